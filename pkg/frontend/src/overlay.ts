// Canvas painting: frame image at native aspect ratio, box overlays with
// class colors, drag handles on the selection, and a class legend.

import type { ViewState } from './state.js';
import type { Box } from './types.js';

export const CLASS_COLORS = [
  '#2f9e44', // 0
  '#e8590c', // 1
  '#1971c2',
  '#9c36b5',
  '#c2255c',
  '#5f3dc4',
  '#099268',
  '#e03131',
  '#f08c00',
  '#3b5bdb',
];

export function classColor(classId: number): string {
  return CLASS_COLORS[((classId % CLASS_COLORS.length) + CLASS_COLORS.length) % CLASS_COLORS.length];
}

export interface ViewTransform {
  scale: number; // display pixels per image pixel
}

/** Fit the image inside the canvas, preserving aspect ratio. */
export function fitScale(
  imageWidth: number,
  imageHeight: number,
  maxWidth: number,
  maxHeight: number,
): ViewTransform {
  if (imageWidth <= 0 || imageHeight <= 0) return { scale: 1 };
  return { scale: Math.min(maxWidth / imageWidth, maxHeight / imageHeight) };
}

export function toImagePoint(t: ViewTransform, displayX: number, displayY: number) {
  return { x: displayX / t.scale, y: displayY / t.scale };
}

function drawBox(
  ctx: CanvasRenderingContext2D,
  box: Box,
  scale: number,
  selected: boolean,
): void {
  const x = box.xMin * scale;
  const y = box.yMin * scale;
  const w = (box.xMax - box.xMin) * scale;
  const h = (box.yMax - box.yMin) * scale;
  ctx.lineWidth = selected ? 3 : 2;
  ctx.strokeStyle = classColor(box.classId);
  ctx.strokeRect(x, y, w, h);
  ctx.font = '12px sans-serif';
  ctx.fillStyle = classColor(box.classId);
  ctx.fillText(String(box.classId), x + 3, y + 13);
  if (selected) {
    ctx.fillStyle = '#ffffff';
    ctx.strokeStyle = '#000000';
    ctx.lineWidth = 1;
    for (const hx of [box.xMin, (box.xMin + box.xMax) / 2, box.xMax]) {
      for (const hy of [box.yMin, (box.yMin + box.yMax) / 2, box.yMax]) {
        if (hx === (box.xMin + box.xMax) / 2 && hy === (box.yMin + box.yMax) / 2) continue;
        ctx.fillRect(hx * scale - 3, hy * scale - 3, 6, 6);
        ctx.strokeRect(hx * scale - 3, hy * scale - 3, 6, 6);
      }
    }
  }
}

export function render(
  ctx: CanvasRenderingContext2D,
  image: CanvasImageSource | null,
  state: ViewState,
  t: ViewTransform,
): void {
  const width = state.imageWidth * t.scale;
  const height = state.imageHeight * t.scale;
  ctx.canvas.width = Math.max(1, Math.round(width));
  ctx.canvas.height = Math.max(1, Math.round(height));
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  if (image !== null) ctx.drawImage(image, 0, 0, width, height);
  state.boxes.forEach((box, i) => drawBox(ctx, box, t.scale, i === state.selected));
}

export function legendEntries(state: ViewState): { classId: number; color: string }[] {
  const ids = new Set<number>();
  for (const b of state.boxes) ids.add(b.classId);
  for (const p of state.predictions) ids.add(p.classId);
  return [...ids].sort((a, b) => a - b).map((classId) => ({ classId, color: classColor(classId) }));
}
