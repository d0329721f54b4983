"""Shared builders for test scenes."""

from __future__ import annotations

import numpy as np
import pytest
from PIL import Image

from framesift.ingest import (
    Annotation,
    AnnotationSet,
    BoundingBox,
    Frame,
    FrameSequence,
    GrayFrame,
    Prediction,
    PredictionSet,
)


def box(x_min, y_min, x_max, y_max) -> BoundingBox:
    return BoundingBox(float(x_min), float(y_min), float(x_max), float(y_max))


def pred(frame, cls, conf, b) -> Prediction:
    return Prediction(frame_index=frame, class_id=cls, box=b, confidence=conf)


def ann(frame, cls, b) -> Annotation:
    return Annotation(frame_index=frame, class_id=cls, box=b)


def pred_set(*preds: Prediction) -> PredictionSet:
    by_frame: dict[int, list[Prediction]] = {}
    for p in preds:
        by_frame.setdefault(p.frame_index, []).append(p)
    return PredictionSet(by_frame={i: tuple(v) for i, v in by_frame.items()})


def ann_set(*anns: Annotation) -> AnnotationSet:
    by_frame: dict[int, list[Annotation]] = {}
    for a in anns:
        by_frame.setdefault(a.frame_index, []).append(a)
    return AnnotationSet(by_frame={i: tuple(v) for i, v in by_frame.items()})


def gray_frame(index: int, intensities) -> GrayFrame:
    plane = np.asarray(intensities, dtype=np.uint8)
    h, w = plane.shape
    return GrayFrame(index=index, width=w, height=h, intensities=plane)


def rgb_frame(index: int, intensities) -> Frame:
    """Frame whose BT.601 luma equals the given intensity grid (r=g=b)."""
    plane = np.asarray(intensities, dtype=np.uint8)
    h, w = plane.shape
    pixels = np.stack([plane, plane, plane], axis=-1)
    return Frame(index=index, width=w, height=h, pixels=pixels)


def gray_sequence(*planes) -> FrameSequence:
    frames = tuple(rgb_frame(i, p) for i, p in enumerate(planes))
    return FrameSequence(frames=frames)


def write_png(path, pixels) -> None:
    Image.fromarray(np.asarray(pixels, dtype=np.uint8), mode="RGB").save(path)


@pytest.fixture
def frames_dir(tmp_path):
    """Directory of three 4x3 PNG frames with distinct content."""
    d = tmp_path / "frames"
    d.mkdir()
    for i in range(3):
        pixels = np.full((3, 4, 3), i * 40, dtype=np.uint8)
        pixels[0, 0] = (255, 0, 0)
        write_png(d / f"{i:06d}.png", pixels)
    return d
