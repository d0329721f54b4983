// View state and transitions for the review screen. All coordinates are
// source-image pixels; boxes only ever come from server payloads or pointer
// gestures, never invented here.

import { ReviewApi } from './api.js';
import {
  applyDrag,
  boxFromDrag,
  clampBox,
  isValidBox,
  normalizeBox,
  pickBox,
  snapBox,
  type Handle,
  type Point,
} from './boxes.js';
import type { Box, FrameStatus, PlanInfo, PredictionBox, StatusCounts } from './types.js';

export type EditMode = 'navigate' | 'draw' | 'adjust';

export interface ViewState {
  frame: number | null;
  status: FrameStatus | null;
  mode: EditMode;
  boxes: Box[];
  predictions: PredictionBox[];
  selected: number | null;
  dirty: boolean;
  counts: StatusCounts;
  error: string | null;
  notice: string | null;
  imageWidth: number;
  imageHeight: number;
}

interface DragSession {
  kind: 'draw' | 'adjust';
  origin: Point;
  index: number;
  handle: Handle;
  original: Box;
}

export const HANDLE_TOLERANCE = 3; // image pixels

const EMPTY_COUNTS: StatusCounts = { unreviewed: 0, accepted: 0, corrected: 0 };

export class ReviewController {
  state: ViewState = {
    frame: null,
    status: null,
    mode: 'navigate',
    boxes: [],
    predictions: [],
    selected: null,
    dirty: false,
    counts: { ...EMPTY_COUNTS },
    error: null,
    notice: null,
    imageWidth: 0,
    imageHeight: 0,
  };
  plan: PlanInfo | null = null;
  drawClass = 0;

  private drag: DragSession | null = null;
  private listeners: ((state: ViewState) => void)[] = [];

  constructor(public api: ReviewApi) {}

  onChange(listener: (state: ViewState) => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  // -- loading -----------------------------------------------------------

  async start(): Promise<void> {
    this.plan = await this.api.plan();
    this.state.counts = this.plan.counts;
    const first = await this.api.next();
    await this.loadFrame(first ?? this.plan.selected[0]);
  }

  async loadFrame(frame: number): Promise<void> {
    const data = await this.api.frameBoxes(frame);
    // Working copy starts from the frame's current truth: corrections when
    // present, otherwise the model's predictions.
    const source = data.corrections ?? data.predictions;
    this.state = {
      ...this.state,
      frame,
      status: data.status,
      boxes: source.map((b) => ({
        classId: b.classId,
        xMin: b.xMin,
        yMin: b.yMin,
        xMax: b.xMax,
        yMax: b.yMax,
      })),
      predictions: data.predictions,
      selected: null,
      dirty: false,
      mode: 'navigate',
      error: null,
      notice: null,
      imageWidth: data.width,
      imageHeight: data.height,
    };
    this.drag = null;
    this.emit();
  }

  // -- navigation --------------------------------------------------------

  private planIndex(frame: number): number {
    return this.plan ? this.plan.selected.indexOf(frame) : -1;
  }

  async gotoNeighbor(step: 1 | -1): Promise<void> {
    if (!this.plan || this.state.frame === null) return;
    const pos = this.planIndex(this.state.frame);
    const next = this.plan.selected[pos + step];
    if (next !== undefined) await this.loadFrame(next);
  }

  async gotoNextUnreviewed(): Promise<void> {
    const after = this.state.frame ?? -1;
    const frame = await this.api.next(after);
    if (frame === null) {
      this.state = { ...this.state, notice: 'all frames reviewed' };
      this.emit();
      return;
    }
    await this.loadFrame(frame);
  }

  // -- review actions ----------------------------------------------------

  async acceptCurrent(): Promise<void> {
    if (this.state.frame === null) return;
    try {
      const ack = await this.api.accept(this.state.frame);
      this.state = {
        ...this.state,
        status: ack.status,
        counts: ack.counts,
        dirty: false,
        error: null,
        notice: `frame ${ack.frame} accepted`,
      };
      this.emit();
      await this.gotoNextUnreviewed();
    } catch (err) {
      this.fail(err);
    }
  }

  /** Submit the working boxes as this frame's corrections. */
  async submitCurrent(): Promise<void> {
    if (this.state.frame === null) return;
    const invalid = this.state.boxes.filter((b) => !isValidBox(b));
    if (invalid.length > 0) {
      // never send a malformed box; keep edits for the annotator to fix
      this.state = { ...this.state, error: 'box has zero or negative extent' };
      this.emit();
      return;
    }
    try {
      const ack = await this.api.submitBoxes(this.state.frame, this.state.boxes);
      this.state = {
        ...this.state,
        status: ack.status,
        counts: ack.counts,
        dirty: false,
        error: null,
        notice: `frame ${ack.frame} corrected`,
      };
      this.emit();
      await this.gotoNextUnreviewed();
    } catch (err) {
      this.fail(err); // unsaved edits stay in this.state.boxes
    }
  }

  async exportLabels(): Promise<void> {
    try {
      const result = await this.api.exportLabels();
      this.state = {
        ...this.state,
        error: null,
        notice: `exported ${result.manifest.exported} frame(s) to ${result.out}`,
      };
      this.emit();
    } catch (err) {
      this.fail(err);
    }
  }

  private fail(err: unknown): void {
    this.state = { ...this.state, error: err instanceof Error ? err.message : String(err) };
    this.emit();
  }

  // -- editing -----------------------------------------------------------

  toggleDrawMode(): void {
    this.state = {
      ...this.state,
      mode: this.state.mode === 'draw' ? 'navigate' : 'draw',
      error: null,
    };
    this.emit();
  }

  /** Revert working boxes to the frame's last-synced truth. */
  async cancelEdits(): Promise<void> {
    if (this.state.frame !== null) await this.loadFrame(this.state.frame);
  }

  deleteSelected(): void {
    if (this.state.selected === null) return;
    const boxes = this.state.boxes.filter((_, i) => i !== this.state.selected);
    this.state = { ...this.state, boxes, selected: null, dirty: true };
    this.emit();
  }

  setSelectedClass(classId: number): void {
    if (this.state.selected === null) return;
    const boxes = this.state.boxes.map((b, i) =>
      i === this.state.selected ? { ...b, classId } : b,
    );
    this.drawClass = classId;
    this.state = { ...this.state, boxes, dirty: true };
    this.emit();
  }

  pointerDown(p: Point): void {
    if (this.state.frame === null) return;
    if (this.state.mode === 'draw') {
      const box = boxFromDrag(p, p, this.drawClass);
      this.drag = { kind: 'draw', origin: p, index: this.state.boxes.length, handle: 'se', original: box };
      this.state = { ...this.state, boxes: [...this.state.boxes, box], selected: this.state.boxes.length };
      this.emit();
      return;
    }
    const hit = pickBox(this.state.boxes, p, HANDLE_TOLERANCE);
    if (hit === null) {
      this.state = { ...this.state, selected: null };
      this.emit();
      return;
    }
    this.drag = {
      kind: 'adjust',
      origin: p,
      index: hit.index,
      handle: hit.handle,
      original: this.state.boxes[hit.index],
    };
    this.state = { ...this.state, selected: hit.index, mode: 'adjust' };
    this.emit();
  }

  pointerMove(p: Point): void {
    if (this.drag === null) return;
    const { kind, origin, index, handle, original } = this.drag;
    const raw =
      kind === 'draw'
        ? boxFromDrag(origin, p, this.drawClass)
        : applyDrag(original, handle, p.x - origin.x, p.y - origin.y);
    const box = clampBox(normalizeBox(raw), this.state.imageWidth, this.state.imageHeight);
    const boxes = this.state.boxes.slice();
    boxes[index] = box;
    this.state = { ...this.state, boxes };
    this.emit();
  }

  pointerUp(p: Point): void {
    if (this.drag === null) return;
    this.pointerMove(p);
    const { index } = this.drag;
    const boxes = this.state.boxes.slice();
    boxes[index] = snapBox(boxes[index]);
    const settled = isValidBox(boxes[index]);
    if (!settled) boxes.splice(index, 1); // zero-extent gesture leaves nothing behind
    this.drag = null;
    this.state = {
      ...this.state,
      boxes,
      selected: settled ? index : null,
      dirty: true,
      mode: this.state.mode === 'draw' ? 'draw' : 'navigate',
    };
    this.emit();
  }
}
