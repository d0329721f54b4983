// Typed client for the review service. Payloads arrive snake_cased from the
// server; everything past this module is camelCase, pixel coordinates.

import type {
  Box,
  ExportResult,
  FrameBoxes,
  FrameStatus,
  MutationAck,
  PlanInfo,
  PredictionBox,
  StatusCounts,
} from './types.js';

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

function toBox(raw: any): Box {
  return {
    classId: raw.class_id,
    xMin: raw.x_min,
    yMin: raw.y_min,
    xMax: raw.x_max,
    yMax: raw.y_max,
  };
}

function fromBox(box: Box) {
  return {
    class_id: box.classId,
    x_min: box.xMin,
    y_min: box.yMin,
    x_max: box.xMax,
    y_max: box.yMax,
  };
}

async function request(url: string, init?: RequestInit): Promise<any> {
  const resp = await fetch(url, init);
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = await resp.json();
      detail = typeof body.detail === 'string' ? body.detail : JSON.stringify(body.detail ?? body);
    } catch {
      // non-JSON error body; keep statusText
    }
    throw new ApiError(resp.status, detail);
  }
  return resp.json();
}

export class ReviewApi {
  constructor(private baseUrl: string = '') {}

  frameImageUrl(frame: number): string {
    return `${this.baseUrl}/api/frames/${frame}`;
  }

  async plan(): Promise<PlanInfo> {
    const raw = await request(`${this.baseUrl}/api/plan`);
    return {
      strategy: raw.strategy,
      fraction: raw.fraction,
      seed: raw.seed,
      totalFrames: raw.total_frames,
      selected: raw.selected,
      width: raw.width,
      height: raw.height,
      counts: raw.counts as StatusCounts,
    };
  }

  async frameBoxes(frame: number): Promise<FrameBoxes> {
    const raw = await request(`${this.baseUrl}/api/frames/${frame}/boxes`);
    return {
      frame: raw.frame,
      status: raw.status as FrameStatus,
      width: raw.width,
      height: raw.height,
      predictions: raw.predictions.map((p: any): PredictionBox => ({
        ...toBox(p),
        confidence: p.confidence,
      })),
      corrections: raw.corrections === null ? null : raw.corrections.map(toBox),
    };
  }

  async accept(frame: number): Promise<MutationAck> {
    const raw = await request(`${this.baseUrl}/api/frames/${frame}/accept`, {
      method: 'POST',
    });
    return { frame: raw.frame, status: raw.status, counts: raw.counts };
  }

  async submitBoxes(frame: number, boxes: Box[]): Promise<MutationAck> {
    const raw = await request(`${this.baseUrl}/api/frames/${frame}/boxes`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ boxes: boxes.map(fromBox) }),
    });
    return { frame: raw.frame, status: raw.status, counts: raw.counts };
  }

  async next(after: number = -1, status: FrameStatus = 'unreviewed'): Promise<number | null> {
    const raw = await request(
      `${this.baseUrl}/api/next?after=${after}&status=${status}`,
    );
    return raw.frame;
  }

  async exportLabels(): Promise<ExportResult> {
    return request(`${this.baseUrl}/api/export`, { method: 'POST' });
  }
}
