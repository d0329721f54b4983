"""Score synthetic detector output: IoU, matching, PR, AP@0.5, mAP@0.5.

The synthetic predictions are jittered copies of the ground truth plus the
occasional low-confidence false positive, so the numbers land near (but not
at) 1.0 and the confidence floor visibly changes precision.
"""

import tempfile
from pathlib import Path

from framesift.ingest import load_annotations, load_predictions, load_sequence
from framesift.metrics import evaluate, iou, match_detections, precision_recall
from framesift.reports import eval_report_table
from framesift.synthetic import generate_dataset

work = Path(tempfile.mkdtemp(prefix="framesift_demo_"))
ds = generate_dataset(work, n_frames=30, seed=0)
seq = load_sequence(ds.frames_dir)
gts = load_annotations(ds.labels_dir, seq.width, seq.height, stems=seq.stems())
preds = load_predictions(ds.predictions_file)
print(f"{len(gts)} ground-truth boxes, {len(preds)} predictions")

# A single pair of boxes first: the classic 1/7 overlap.
a = gts.for_frame(0)[0].box
print(f"\nIoU of a box with itself: {iou(a, a):.3f}")
print(f"IoU of truth vs prediction on frame 0: {iou(a, preds.for_frame(0)[0].box):.3f}")

m = match_detections(preds, gts, iou_threshold=0.5)
precision, recall = precision_recall(m)
print(f"\ngreedy matching at IoU >= 0.5: TP={m.tp} FP={m.fp} FN={m.fn}")
print(f"precision={precision:.4f} recall={recall:.4f}")

report = evaluate(preds, gts, iou_threshold=0.5)
print("\nfull report:")
print(eval_report_table(report))

# Raising the confidence floor drops the sporadic low-confidence FPs.
strict = evaluate(preds, gts, iou_threshold=0.5, conf_min=0.5)
print(f"with conf_min=0.5: TP={strict.tp} FP={strict.fp} FN={strict.fn} "
      f"mAP@0.5={strict.map50:.4f} (was {report.map50:.4f})")
