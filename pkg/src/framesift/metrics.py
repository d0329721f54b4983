"""Detection-quality evaluation: IoU, greedy matching, PR, AP@0.5, mAP@0.5.

Matching is per frame and per class: predictions are taken in descending
confidence and greedily claim the unmatched ground-truth box of highest
overlap at or above the threshold. AP uses all-point interpolation (area
under the precision envelope), the convention of common detector toolchains.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import InvalidThreshold, NoGroundTruth
from .ingest import Annotation, AnnotationSet, BoundingBox, Prediction, PredictionSet

DEFAULT_IOU_THRESHOLD = 0.5


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection-over-union of two boxes; 0.0 when disjoint."""
    x_left = max(a.x_min, b.x_min)
    y_top = max(a.y_min, b.y_min)
    x_right = min(a.x_max, b.x_max)
    y_bottom = min(a.y_max, b.y_max)
    if x_right <= x_left or y_bottom <= y_top:
        return 0.0
    inter = (x_right - x_left) * (y_bottom - y_top)
    union = a.area + b.area - inter
    return inter / union


@dataclass(frozen=True)
class MatchedPair:
    """One prediction's fate: its ground-truth partner (or None) and their IoU."""

    frame_index: int
    class_id: int
    prediction: Prediction
    annotation: Annotation | None
    iou: float


@dataclass(frozen=True)
class MatchResult:
    """Greedy matching outcome with TP/FP/FN bookkeeping."""

    pairs: tuple[MatchedPair, ...]
    tp: int
    fp: int
    fn: int
    iou_threshold: float


def _check_threshold(iou_threshold: float) -> None:
    if not 0.0 < iou_threshold < 1.0:
        raise InvalidThreshold(f"IoU threshold {iou_threshold} outside (0, 1)")


def _greedy_frame_class(
    preds: Sequence[Prediction],
    gts: Sequence[Annotation],
    iou_threshold: float,
) -> tuple[list[tuple[Prediction, Annotation | None, float]], int]:
    """Match one frame's one-class predictions; returns (pairs, matched_gt_count).

    Predictions are visited by descending confidence (ties keep input order);
    each claims the unmatched GT of highest IoU >= threshold, earlier-inserted
    GT winning IoU ties.
    """
    order = sorted(range(len(preds)), key=lambda i: (-preds[i].confidence, i))
    taken = [False] * len(gts)
    pairs: list[tuple[Prediction, Annotation | None, float]] = [None] * len(preds)  # type: ignore[list-item]
    matched = 0
    for i in order:
        best_j = -1
        best_iou = 0.0
        for j, gt in enumerate(gts):
            if taken[j]:
                continue
            overlap = iou(preds[i].box, gt.box)
            if overlap > best_iou:
                best_iou = overlap
                best_j = j
        if best_j >= 0 and best_iou >= iou_threshold:
            taken[best_j] = True
            matched += 1
            pairs[i] = (preds[i], gts[best_j], best_iou)
        else:
            pairs[i] = (preds[i], None, best_iou)
    return pairs, matched


def match_detections(
    preds: PredictionSet,
    gts: AnnotationSet,
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
    class_id: int | None = None,
) -> MatchResult:
    """Greedily match predictions to ground truth per frame, per class.

    With ``class_id`` given, only that class is considered on each frame.
    """
    _check_threshold(iou_threshold)
    pairs: list[MatchedPair] = []
    tp = fp = fn = 0
    frames = sorted(set(preds.by_frame) | set(gts.by_frame))
    for f in frames:
        frame_preds = preds.for_frame(f)
        frame_gts = gts.for_frame(f)
        classes = {p.class_id for p in frame_preds} | {g.class_id for g in frame_gts}
        if class_id is not None:
            classes &= {class_id}
        for c in sorted(classes):
            c_preds = [p for p in frame_preds if p.class_id == c]
            c_gts = [g for g in frame_gts if g.class_id == c]
            frame_pairs, matched = _greedy_frame_class(c_preds, c_gts, iou_threshold)
            for pred, ann, overlap in frame_pairs:
                pairs.append(MatchedPair(f, c, pred, ann, overlap))
            tp += matched
            fp += len(c_preds) - matched
            fn += len(c_gts) - matched
    return MatchResult(
        pairs=tuple(pairs), tp=tp, fp=fp, fn=fn, iou_threshold=iou_threshold
    )


def precision_recall(m: MatchResult) -> tuple[float, float]:
    """(precision, recall); both vacuously 1.0 when their denominator is 0."""
    precision = m.tp / (m.tp + m.fp) if (m.tp + m.fp) > 0 else 1.0
    recall = m.tp / (m.tp + m.fn) if (m.tp + m.fn) > 0 else 1.0
    return precision, recall


def average_precision(
    preds: PredictionSet,
    gts: AnnotationSet,
    class_id: int,
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
) -> float:
    """AP for one class, pooled over all frames, all-point interpolation.

    Predictions are swept in global confidence order (ties: lower frame index,
    then input order); each is a TP if it claims an unmatched GT on its frame
    at IoU >= threshold. AP is the area under the precision envelope.
    """
    _check_threshold(iou_threshold)
    total_gt = sum(
        sum(1 for g in anns if g.class_id == class_id)
        for anns in gts.by_frame.values()
    )
    if total_gt == 0:
        raise NoGroundTruth(f"class {class_id} has no ground-truth boxes")

    flat: list[tuple[float, int, int, Prediction]] = []
    for f in sorted(preds.by_frame):
        for pos, p in enumerate(preds.for_frame(f)):
            if p.class_id == class_id:
                flat.append((p.confidence, f, pos, p))
    flat.sort(key=lambda item: (-item[0], item[1], item[2]))

    taken: dict[int, list[bool]] = {}
    tp_flags: list[bool] = []
    for _, f, _, p in flat:
        frame_gts = [g for g in gts.for_frame(f) if g.class_id == class_id]
        if f not in taken:
            taken[f] = [False] * len(frame_gts)
        best_j = -1
        best_iou = 0.0
        for j, gt in enumerate(frame_gts):
            if taken[f][j]:
                continue
            overlap = iou(p.box, gt.box)
            if overlap > best_iou:
                best_iou = overlap
                best_j = j
        if best_j >= 0 and best_iou >= iou_threshold:
            taken[f][best_j] = True
            tp_flags.append(True)
        else:
            tp_flags.append(False)

    # Cumulative PR curve, then area under the running-max precision envelope.
    points: list[tuple[float, float]] = []
    tp_cum = 0
    for rank, is_tp in enumerate(tp_flags, start=1):
        if is_tp:
            tp_cum += 1
        points.append((tp_cum / total_gt, tp_cum / rank))
    envelope: list[tuple[float, float]] = []
    best = 0.0
    for recall, precision in reversed(points):
        best = max(best, precision)
        envelope.append((recall, best))
    envelope.reverse()
    ap = 0.0
    prev_recall = 0.0
    for recall, precision in envelope:
        if recall > prev_recall:
            ap += (recall - prev_recall) * precision
            prev_recall = recall
    return ap


def map50(per_class_aps: Mapping[int, float]) -> float:
    """Unweighted mean of per-class APs (classes with ground truth only)."""
    if not per_class_aps:
        raise NoGroundTruth("no class has ground-truth boxes")
    return sum(per_class_aps.values()) / len(per_class_aps)


@dataclass(frozen=True, eq=False)
class IoUCurve:
    """Per-frame best-prediction IoU for one class over an ordered frame set."""

    class_id: int
    frames: tuple[int, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.frames) != len(self.values):
            raise ValueError("one IoU value per evaluated frame")
        if any(not 0.0 <= v <= 1.0 for v in self.values):
            raise ValueError("IoU values must lie in [0, 1]")

    def __len__(self) -> int:
        return len(self.frames)


def per_frame_iou_curve(
    preds: PredictionSet,
    gts: AnnotationSet,
    class_id: int,
    frames: Iterable[int],
) -> IoUCurve:
    """IoU of the highest-confidence class prediction vs its best GT, per frame.

    A frame with boxes on only one side scores 0.0; a frame empty on both
    sides scores 1.0 (correct "nothing there" agreement).
    """
    frame_list = tuple(frames)
    values = []
    for f in frame_list:
        frame_preds = [p for p in preds.for_frame(f) if p.class_id == class_id]
        frame_gts = [g for g in gts.for_frame(f) if g.class_id == class_id]
        if not frame_preds and not frame_gts:
            values.append(1.0)
        elif not frame_preds or not frame_gts:
            values.append(0.0)
        else:
            top = max(
                range(len(frame_preds)),
                key=lambda i: (frame_preds[i].confidence, -i),
            )
            best = max(iou(frame_preds[top].box, g.box) for g in frame_gts)
            values.append(best)
    return IoUCurve(class_id=class_id, frames=frame_list, values=tuple(values))


def export_iou_curve(curve: IoUCurve, path: str | Path) -> None:
    """Two-column ``frame_index iou`` dump for external plotting."""
    lines = [f"{f} {v!r}" for f, v in zip(curve.frames, curve.values)]
    Path(path).write_text("\n".join(lines) + "\n")


@dataclass(frozen=True, eq=False)
class EvalReport:
    """Per-class precision/recall/AP plus overall mAP@0.5 and counts."""

    per_class_precision: Mapping[int, float]
    per_class_recall: Mapping[int, float]
    per_class_ap: Mapping[int, float]
    map50: float
    tp: int
    fp: int
    fn: int
    iou_threshold: float
    conf_min: float
    skipped_classes: tuple[int, ...] = ()  # predicted classes with zero GT
    class_names: Mapping[int, str] = field(default_factory=dict)

    def class_label(self, class_id: int) -> str:
        return self.class_names.get(class_id, str(class_id))


def evaluate(
    preds: PredictionSet,
    gts: AnnotationSet,
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
    conf_min: float = 0.0,
) -> EvalReport:
    """Full per-class evaluation at one IoU threshold.

    Predictions under ``conf_min`` are dropped first. Classes without any
    ground truth are excluded from mAP and reported in ``skipped_classes``.
    """
    _check_threshold(iou_threshold)
    kept = preds.above_confidence(conf_min) if conf_min > 0.0 else preds
    gt_classes = gts.class_ids()
    pred_only = [c for c in kept.class_ids() if c not in gt_classes]
    per_precision: dict[int, float] = {}
    per_recall: dict[int, float] = {}
    per_ap: dict[int, float] = {}
    tp = fp = fn = 0
    for c in gt_classes:
        m = match_detections(kept, gts, iou_threshold, class_id=c)
        p, r = precision_recall(m)
        per_precision[c] = p
        per_recall[c] = r
        per_ap[c] = average_precision(kept, gts, c, iou_threshold)
        tp += m.tp
        fp += m.fp
        fn += m.fn
    # Predictions of GT-less classes still count as false positives overall.
    for c in pred_only:
        fp += sum(
            1 for ps in kept.by_frame.values() for p in ps if p.class_id == c
        )
    names = dict(gts.class_names or kept.class_names)
    return EvalReport(
        per_class_precision=per_precision,
        per_class_recall=per_recall,
        per_class_ap=per_ap,
        map50=map50(per_ap),
        tp=tp,
        fp=fp,
        fn=fn,
        iou_threshold=iou_threshold,
        conf_min=conf_min,
        skipped_classes=tuple(pred_only),
        class_names=names,
    )
