// Box geometry for the editor. Everything operates in source-image pixels;
// display scaling happens in the rendering layer only.

import type { Box } from './types.js';

export type Handle = 'nw' | 'n' | 'ne' | 'e' | 'se' | 's' | 'sw' | 'w' | 'move';

export interface Point {
  x: number;
  y: number;
}

export function isValidBox(box: Box): boolean {
  const edges = [box.xMin, box.yMin, box.xMax, box.yMax];
  if (edges.some((v) => !Number.isFinite(v) || v < 0)) return false;
  return box.xMin < box.xMax && box.yMin < box.yMax;
}

/** Swap inverted edges so drags past the opposite side stay well-formed. */
export function normalizeBox(box: Box): Box {
  return {
    classId: box.classId,
    xMin: Math.min(box.xMin, box.xMax),
    yMin: Math.min(box.yMin, box.yMax),
    xMax: Math.max(box.xMin, box.xMax),
    yMax: Math.max(box.yMin, box.yMax),
  };
}

/** Snap every edge to whole pixels. */
export function snapBox(box: Box): Box {
  return {
    classId: box.classId,
    xMin: Math.round(box.xMin),
    yMin: Math.round(box.yMin),
    xMax: Math.round(box.xMax),
    yMax: Math.round(box.yMax),
  };
}

export function clampBox(box: Box, width: number, height: number): Box {
  return {
    classId: box.classId,
    xMin: Math.min(Math.max(box.xMin, 0), width),
    yMin: Math.min(Math.max(box.yMin, 0), height),
    xMax: Math.min(Math.max(box.xMax, 0), width),
    yMax: Math.min(Math.max(box.yMax, 0), height),
  };
}

/**
 * What a pointer press at `p` grabs on `box`: a corner, an edge, the interior
 * (move), or nothing. Corners win over edges when within tolerance of both.
 */
export function hitTest(box: Box, p: Point, tolerance: number): Handle | null {
  const nearX0 = Math.abs(p.x - box.xMin) <= tolerance;
  const nearX1 = Math.abs(p.x - box.xMax) <= tolerance;
  const nearY0 = Math.abs(p.y - box.yMin) <= tolerance;
  const nearY1 = Math.abs(p.y - box.yMax) <= tolerance;
  const inX = p.x >= box.xMin - tolerance && p.x <= box.xMax + tolerance;
  const inY = p.y >= box.yMin - tolerance && p.y <= box.yMax + tolerance;

  if (nearX0 && nearY0) return 'nw';
  if (nearX1 && nearY0) return 'ne';
  if (nearX1 && nearY1) return 'se';
  if (nearX0 && nearY1) return 'sw';
  if (nearY0 && inX) return 'n';
  if (nearY1 && inX) return 's';
  if (nearX0 && inY) return 'w';
  if (nearX1 && inY) return 'e';
  if (p.x > box.xMin && p.x < box.xMax && p.y > box.yMin && p.y < box.yMax) {
    return 'move';
  }
  return null;
}

/** Apply a drag of (dx, dy) from the grab point to the original box. */
export function applyDrag(box: Box, handle: Handle, dx: number, dy: number): Box {
  const moved = { ...box };
  if (handle === 'move') {
    moved.xMin += dx;
    moved.xMax += dx;
    moved.yMin += dy;
    moved.yMax += dy;
    return moved;
  }
  if (handle.includes('w')) moved.xMin += dx;
  if (handle.includes('e')) moved.xMax += dx;
  if (handle.includes('n')) moved.yMin += dy;
  if (handle.includes('s')) moved.yMax += dy;
  return moved;
}

/** Box spanned by a draw gesture from `start` to `current`. */
export function boxFromDrag(start: Point, current: Point, classId: number): Box {
  return normalizeBox({
    classId,
    xMin: start.x,
    yMin: start.y,
    xMax: current.x,
    yMax: current.y,
  });
}

/** Topmost box whose body or handles contain the point, preferring handles. */
export function pickBox(
  boxes: Box[],
  p: Point,
  tolerance: number,
): { index: number; handle: Handle } | null {
  // Pass 1: handle grabs beat interior grabs of earlier boxes.
  for (let i = boxes.length - 1; i >= 0; i--) {
    const handle = hitTest(boxes[i], p, tolerance);
    if (handle !== null && handle !== 'move') return { index: i, handle };
  }
  for (let i = boxes.length - 1; i >= 0; i--) {
    if (hitTest(boxes[i], p, tolerance) === 'move') return { index: i, handle: 'move' };
  }
  return null;
}
