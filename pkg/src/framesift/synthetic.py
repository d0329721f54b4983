"""Deterministic synthetic video + labels + predictions for demos and tests.

A bright "tool" rectangle moves over a gradient backdrop with a mid-sequence
speed burst (so frame differencing has something to rank), and a static dark
"marker" blob sits in one corner. Ground-truth labels track both objects;
predictions are seeded jitters of the truth with occasional false positives.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .ingest import (
    Annotation,
    AnnotationSet,
    BoundingBox,
    Prediction,
    PredictionSet,
    box_to_normalized,
    save_predictions,
)

CLASS_NAMES = {0: "tool", 1: "marker"}

TOOL_W, TOOL_H = 14, 10
MARKER_W, MARKER_H = 8, 8


@dataclass(frozen=True)
class SyntheticDataset:
    """Paths and in-memory truth for one generated dataset."""

    root: Path
    frames_dir: Path
    labels_dir: Path
    predictions_file: Path
    n_frames: int
    width: int
    height: int
    annotations: AnnotationSet
    predictions: PredictionSet


def _tool_position(t: int, n_frames: int, width: int, height: int) -> tuple[int, int]:
    """Top-left corner of the tool at frame t; fast in the middle third."""
    slow, fast = 1, 5
    burst_lo, burst_hi = n_frames // 3, 2 * n_frames // 3
    x = 2
    for step in range(t):
        x += fast if burst_lo <= step < burst_hi else slow
    x_max = width - TOOL_W - 2
    # Bounce between the margins.
    span = max(1, x_max - 2)
    phase = (x - 2) % (2 * span)
    x = 2 + (phase if phase < span else 2 * span - phase)
    y = height // 2 - TOOL_H // 2 + (2 if (t // 8) % 2 else 0)
    return x, y


def _render_frame(
    t: int, n_frames: int, width: int, height: int
) -> tuple[np.ndarray, list[BoundingBox]]:
    xs = np.linspace(30, 90, width, dtype=np.uint8)
    pixels = np.tile(xs, (height, 1))
    pixels = np.stack([pixels, pixels, pixels], axis=-1).astype(np.uint8)

    tx, ty = _tool_position(t, n_frames, width, height)
    pixels[ty : ty + TOOL_H, tx : tx + TOOL_W] = (230, 225, 210)

    mx, my = width - MARKER_W - 3, height - MARKER_H - 3
    pixels[my : my + MARKER_H, mx : mx + MARKER_W] = (15, 60, 15)

    boxes = [
        BoundingBox(float(tx), float(ty), float(tx + TOOL_W), float(ty + TOOL_H)),
        BoundingBox(float(mx), float(my), float(mx + MARKER_W), float(my + MARKER_H)),
    ]
    return pixels, boxes


def _jitter_box(
    box: BoundingBox, rng: random.Random, width: int, height: int, spread: float
) -> BoundingBox:
    dx = rng.uniform(-spread, spread)
    dy = rng.uniform(-spread, spread)
    grow = rng.uniform(-spread / 2, spread / 2)
    return BoundingBox(
        x_min=min(max(0.0, box.x_min + dx - grow), width - 2.0),
        y_min=min(max(0.0, box.y_min + dy - grow), height - 2.0),
        x_max=max(min(float(width), box.x_max + dx + grow), 2.0),
        y_max=max(min(float(height), box.y_max + dy + grow), 2.0),
    )


def generate_dataset(
    root: str | Path,
    n_frames: int = 30,
    width: int = 64,
    height: int = 48,
    seed: int = 0,
    jitter: float = 2.0,
) -> SyntheticDataset:
    """Write frames/, labels/, and predictions.txt under ``root``."""
    root = Path(root)
    frames_dir = root / "frames"
    labels_dir = root / "labels"
    frames_dir.mkdir(parents=True, exist_ok=True)
    labels_dir.mkdir(parents=True, exist_ok=True)

    rng = random.Random(seed)
    annotations: dict[int, tuple[Annotation, ...]] = {}
    predictions: dict[int, tuple[Prediction, ...]] = {}
    flat_preds: list[Prediction] = []
    for t in range(n_frames):
        pixels, boxes = _render_frame(t, n_frames, width, height)
        Image.fromarray(pixels, mode="RGB").save(frames_dir / f"{t:06d}.png")

        anns = tuple(
            Annotation(frame_index=t, class_id=c, box=b)
            for c, b in enumerate(boxes)
        )
        annotations[t] = anns
        label_lines = []
        for ann in anns:
            cx, cy, w, h = box_to_normalized(ann.box, width, height)
            label_lines.append(
                f"{ann.class_id} {cx:.6f} {cy:.6f} {w:.6f} {h:.6f}"
            )
        (labels_dir / f"{t:06d}.txt").write_text("\n".join(label_lines) + "\n")

        frame_preds = []
        for ann in anns:
            frame_preds.append(
                Prediction(
                    frame_index=t,
                    class_id=ann.class_id,
                    box=_jitter_box(ann.box, rng, width, height, jitter),
                    confidence=round(rng.uniform(0.55, 0.99), 4),
                )
            )
        if rng.random() < 0.15:  # sporadic false positive
            fx = rng.uniform(1, width - 10)
            fy = rng.uniform(1, height - 10)
            frame_preds.append(
                Prediction(
                    frame_index=t,
                    class_id=0,
                    box=BoundingBox(fx, fy, fx + 6, fy + 5),
                    confidence=round(rng.uniform(0.05, 0.4), 4),
                )
            )
        predictions[t] = tuple(frame_preds)
        flat_preds.extend(frame_preds)

    predictions_file = root / "predictions.txt"
    save_predictions(flat_preds, predictions_file)
    return SyntheticDataset(
        root=root,
        frames_dir=frames_dir,
        labels_dir=labels_dir,
        predictions_file=predictions_file,
        n_frames=n_frames,
        width=width,
        height=height,
        annotations=AnnotationSet(by_frame=annotations, class_names=CLASS_NAMES),
        predictions=PredictionSet(by_frame=predictions, class_names=CLASS_NAMES),
    )
