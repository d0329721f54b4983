// Keyboard map: the whole accept/correct/advance loop works without a mouse.
//
//   a / Enter   accept current frame
//   s           submit corrections
//   j / →       next plan frame        k / ←   previous plan frame
//   n           jump to next unreviewed
//   d           toggle draw mode
//   x / Delete  delete selected box
//   0-9         set class of selected box (and the draw class)
//   Escape      discard unsaved edits / leave draw mode
//   e           export labels

import type { ReviewController } from './state.js';

export function handleKey(controller: ReviewController, key: string): boolean {
  switch (key) {
    case 'a':
    case 'Enter':
      void controller.acceptCurrent();
      return true;
    case 's':
      void controller.submitCurrent();
      return true;
    case 'j':
    case 'ArrowRight':
      void controller.gotoNeighbor(1);
      return true;
    case 'k':
    case 'ArrowLeft':
      void controller.gotoNeighbor(-1);
      return true;
    case 'n':
      void controller.gotoNextUnreviewed();
      return true;
    case 'd':
      controller.toggleDrawMode();
      return true;
    case 'x':
    case 'Delete':
      controller.deleteSelected();
      return true;
    case 'Escape':
      void controller.cancelEdits();
      return true;
    case 'e':
      void controller.exportLabels();
      return true;
    default:
      if (/^[0-9]$/.test(key)) {
        controller.setSelectedClass(Number(key));
        return true;
      }
      return false;
  }
}

export function attachKeyboard(controller: ReviewController, target: Document): void {
  target.addEventListener('keydown', (event: KeyboardEvent) => {
    if (event.target instanceof HTMLInputElement) return;
    if (event.metaKey || event.ctrlKey || event.altKey) return;
    if (handleKey(controller, event.key)) event.preventDefault();
  });
}
