// End-to-end review loop against the real Python service: accept one frame,
// drag-correct another, export, and verify the exported labels and manifest.
// Requires the framesift Python package to be installed (pip install -e ..).

import { spawn, spawnSync, type ChildProcess } from 'node:child_process';
import { mkdtempSync, readFileSync, rmSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ReviewApi } from '../src/api.js';
import { ReviewController } from '../src/state.js';
import type { Box } from '../src/types.js';

const PORT = 8900 + Math.floor(Math.random() * 500);
const BASE = `http://127.0.0.1:${PORT}`;
const WIDTH = 64;
const HEIGHT = 48;

let work: string;
let server: ChildProcess | null = null;

async function serviceUp(): Promise<boolean> {
  try {
    const resp = await fetch(`${BASE}/api/plan`);
    return resp.ok;
  } catch {
    return false;
  }
}

beforeAll(async () => {
  work = mkdtempSync(join(tmpdir(), 'framesift-e2e-'));
  const prep = spawnSync(
    'python3',
    [
      '-c',
      `
from framesift.synthetic import generate_dataset
from framesift.sampling import uniform_sample, export_plan
from framesift.ingest import load_sequence
ds = generate_dataset(r'${work}/data', n_frames=10, seed=4)
seq = load_sequence(ds.frames_dir)
export_plan(uniform_sample(len(seq), 0.5), r'${work}/plan.txt')
`,
    ],
    { encoding: 'utf-8' },
  );
  if (prep.status !== 0) throw new Error(`dataset prep failed: ${prep.stderr}`);

  server = spawn(
    'python3',
    [
      '-m', 'framesift.cli', 'serve',
      '--frames', join(work, 'data', 'frames'),
      '--plan', join(work, 'plan.txt'),
      '--preds', join(work, 'data', 'predictions.txt'),
      '--journal', join(work, 'journal.jsonl'),
      '--export-dir', join(work, 'export'),
      '--port', String(PORT),
    ],
    { stdio: 'ignore' },
  );
  for (let i = 0; i < 100; i++) {
    if (await serviceUp()) return;
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error('review service did not come up');
}, 30_000);

afterAll(() => {
  server?.kill();
  rmSync(work, { recursive: true, force: true });
});

function parseLabelFile(path: string): Box[] {
  return readFileSync(path, 'utf-8')
    .trim()
    .split('\n')
    .filter((line) => line.length > 0)
    .map((line) => {
      const [classId, cx, cy, w, h] = line.split(' ').map(Number);
      return {
        classId,
        xMin: (cx - w / 2) * WIDTH,
        yMin: (cy - h / 2) * HEIGHT,
        xMax: (cx + w / 2) * WIDTH,
        yMax: (cy + h / 2) * HEIGHT,
      };
    });
}

function expectClose(a: Box, b: Box, tolerance: number): void {
  expect(a.classId).toBe(b.classId);
  expect(Math.abs(a.xMin - b.xMin)).toBeLessThanOrEqual(tolerance);
  expect(Math.abs(a.yMin - b.yMin)).toBeLessThanOrEqual(tolerance);
  expect(Math.abs(a.xMax - b.xMax)).toBeLessThanOrEqual(tolerance);
  expect(Math.abs(a.yMax - b.yMax)).toBeLessThanOrEqual(tolerance);
}

describe('review loop against the live service', () => {
  it('accepts, drag-corrects, exports; labels and provenance round-trip', async () => {
    const api = new ReviewApi(BASE);
    const controller = new ReviewController(api);
    await controller.start();

    // plan is every 2nd of 10 frames; session starts at the first one
    expect(controller.plan?.selected).toEqual([0, 2, 4, 6, 8]);
    expect(controller.state.frame).toBe(0);
    expect(controller.state.boxes.length).toBeGreaterThan(0);

    // frame images are served as real PNG bytes
    const image = await fetch(api.frameImageUrl(0));
    expect(image.headers.get('content-type')).toBe('image/png');
    expect((await image.arrayBuffer()).byteLength).toBeGreaterThan(0);

    // accept frame 0 -> auto-advance to frame 2
    await controller.acceptCurrent();
    expect(controller.state.error).toBeNull();
    expect(controller.state.frame).toBe(2);
    expect(controller.state.counts.accepted).toBe(1);

    // drag the first box by its se corner, then submit the correction
    const before = controller.state.boxes[0];
    controller.pointerDown({ x: before.xMax, y: before.yMax });
    controller.pointerMove({ x: before.xMax + 5, y: before.yMax + 4 });
    controller.pointerUp({ x: before.xMax + 5, y: before.yMax + 4 });
    const dragged = controller.state.boxes.map((b) => ({ ...b }));
    expect(dragged[0].xMax).toBeGreaterThan(before.xMax);
    await controller.submitCurrent();
    expect(controller.state.error).toBeNull();
    expect(controller.state.counts.corrected).toBe(1);

    // server re-fetch returns exactly the submitted boxes
    const refetched = await api.frameBoxes(2);
    expect(refetched.status).toBe('corrected');
    expect(refetched.corrections).toEqual(dragged);

    // export and verify files on disk
    await controller.exportLabels();
    expect(controller.state.error).toBeNull();

    const manifest = JSON.parse(readFileSync(join(work, 'export', 'manifest.json'), 'utf-8'));
    const byFrame: Record<number, { status: string; source: string }> = {};
    for (const entry of manifest.frames) byFrame[entry.frame] = entry;
    expect(manifest.exported).toBe(2);
    expect(byFrame[0].source).toBe('model_accepted');
    expect(byFrame[0].status).toBe('accepted');
    expect(byFrame[2].source).toBe('human_corrected');
    expect(byFrame[2].status).toBe('corrected');

    // exported labels match the drag-corrected boxes within 0.5 px per edge
    const exported = parseLabelFile(join(work, 'export', '000002.txt'));
    expect(exported).toHaveLength(dragged.length);
    exported.forEach((box, i) => expectClose(box, dragged[i], 0.5));

    // accepted frame exports the model predictions within the same tolerance
    const accepted = parseLabelFile(join(work, 'export', '000000.txt'));
    const predictions = (await api.frameBoxes(0)).predictions;
    expect(accepted).toHaveLength(predictions.length);
    accepted.forEach((box, i) =>
      expectClose(box, predictions[i], 0.5),
    );
  }, 30_000);

  it('rejects an inverted correction server-side with state intact', async () => {
    const api = new ReviewApi(BASE);
    const resp = await fetch(`${BASE}/api/frames/4/boxes`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({
        boxes: [{ class_id: 0, x_min: 30, y_min: 5, x_max: 10, y_max: 20 }],
      }),
    });
    expect(resp.status).toBe(422);
    expect((await api.frameBoxes(4)).status).toBe('unreviewed');
  });

  it('ui bundle note: next-queue reflects remaining work', async () => {
    const api = new ReviewApi(BASE);
    // frames 0 and 2 are done; the queue continues at 4 and wraps correctly
    expect(await api.next(-1)).toBe(4);
    expect(await api.next(8)).toBe(4);
  });
});
