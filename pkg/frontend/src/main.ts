// DOM bootstrap: wires the controller to the canvas, sidebar, and keyboard.

import { ReviewApi } from './api.js';
import { attachKeyboard } from './keyboard.js';
import { fitScale, legendEntries, render, toImagePoint, type ViewTransform } from './overlay.js';
import { ReviewController, type ViewState } from './state.js';

const api = new ReviewApi('');
const controller = new ReviewController(api);

const canvas = document.getElementById('frame') as HTMLCanvasElement;
const ctx = canvas.getContext('2d')!;
const stage = document.getElementById('stage')!;
const statusBadge = document.getElementById('status')!;
const frameLabel = document.getElementById('frame-label')!;
const progress = document.getElementById('progress')!;
const legend = document.getElementById('legend')!;
const message = document.getElementById('message')!;
const modeLabel = document.getElementById('mode')!;

let image: HTMLImageElement | null = null;
let transform: ViewTransform = { scale: 1 };
let loadedFrame: number | null = null;

function refresh(state: ViewState): void {
  if (state.frame !== null && state.frame !== loadedFrame) {
    loadedFrame = state.frame;
    const img = new Image();
    img.onload = () => {
      image = img;
      refresh(controller.state);
    };
    img.onerror = () => {
      image = null;
      message.textContent = `failed to fetch frame ${state.frame} — retry with R`;
      message.className = 'error';
    };
    img.src = api.frameImageUrl(state.frame);
  }
  transform = fitScale(
    state.imageWidth,
    state.imageHeight,
    stage.clientWidth - 16,
    stage.clientHeight - 16,
  );
  render(ctx, image, state, transform);

  frameLabel.textContent = state.frame === null ? '—' : `frame ${state.frame}`;
  statusBadge.textContent = (state.status ?? '—') + (state.dirty ? ' *' : '');
  statusBadge.className = `badge ${state.status ?? ''}`;
  modeLabel.textContent = state.mode;
  progress.textContent =
    `unreviewed ${state.counts.unreviewed} · ` +
    `accepted ${state.counts.accepted} · corrected ${state.counts.corrected}`;
  legend.innerHTML = legendEntries(state)
    .map((e) => `<span class="chip" style="background:${e.color}">${e.classId}</span>`)
    .join(' ');
  if (state.error) {
    message.textContent = state.error;
    message.className = 'error';
  } else {
    message.textContent = state.notice ?? '';
    message.className = 'notice';
  }
}

controller.onChange(refresh);

canvas.addEventListener('pointerdown', (e) => {
  canvas.setPointerCapture(e.pointerId);
  const rect = canvas.getBoundingClientRect();
  controller.pointerDown(toImagePoint(transform, e.clientX - rect.left, e.clientY - rect.top));
});
canvas.addEventListener('pointermove', (e) => {
  const rect = canvas.getBoundingClientRect();
  controller.pointerMove(toImagePoint(transform, e.clientX - rect.left, e.clientY - rect.top));
});
canvas.addEventListener('pointerup', (e) => {
  const rect = canvas.getBoundingClientRect();
  controller.pointerUp(toImagePoint(transform, e.clientX - rect.left, e.clientY - rect.top));
});

attachKeyboard(controller, document);
document.addEventListener('keydown', (e) => {
  if (e.key === 'r' && loadedFrame !== null) {
    loadedFrame = null; // force image re-fetch
    refresh(controller.state);
  }
});

for (const [id, action] of Object.entries({
  'btn-accept': () => controller.acceptCurrent(),
  'btn-submit': () => controller.submitCurrent(),
  'btn-draw': () => controller.toggleDrawMode(),
  'btn-next': () => controller.gotoNextUnreviewed(),
  'btn-export': () => controller.exportLabels(),
})) {
  document.getElementById(id)?.addEventListener('click', () => void action());
}

window.addEventListener('resize', () => refresh(controller.state));

controller.start().catch((err) => {
  message.textContent = `cannot reach review service: ${err}`;
  message.className = 'error';
});
