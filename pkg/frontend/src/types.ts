export type FrameStatus = 'unreviewed' | 'accepted' | 'corrected';

export interface Box {
  classId: number;
  xMin: number;
  yMin: number;
  xMax: number;
  yMax: number;
}

export interface PredictionBox extends Box {
  confidence: number;
}

export interface StatusCounts {
  unreviewed: number;
  accepted: number;
  corrected: number;
}

export interface PlanInfo {
  strategy: string;
  fraction: number;
  seed: number | null;
  totalFrames: number;
  selected: number[];
  width: number;
  height: number;
  counts: StatusCounts;
}

export interface FrameBoxes {
  frame: number;
  status: FrameStatus;
  width: number;
  height: number;
  predictions: PredictionBox[];
  corrections: Box[] | null;
}

export interface MutationAck {
  frame: number;
  status: FrameStatus;
  counts: StatusCounts;
}

export interface ExportResult {
  out: string;
  manifest: {
    exported: number;
    frames: { frame: number; stem: string; status: string; source: string; boxes: number }[];
  };
}
