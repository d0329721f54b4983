"""Frame decoding, grayscale conversion, and label/prediction file parsing.

Frames come from a directory of same-size PNG/BMP images (or an explicit
``frames.txt`` manifest). Labels follow the normalized detection-training
layout (``class_id cx cy w h`` per line, one text file per frame); prediction
files carry one pixel-space record per line. Everything parses into immutable
structures that the sampling, metrics, and stability modules share.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    DecodeError,
    DimensionMismatch,
    EmptySequence,
    ParseError,
    RangeError,
)

DEFAULT_FPS = 30.0

IMAGE_SUFFIXES = (".png", ".bmp")

MODEL_ACCEPTED = "model_accepted"
HUMAN_CORRECTED = "human_corrected"


@dataclass(frozen=True, eq=False)
class Frame:
    """One RGB8 video frame with its position in the sequence."""

    index: int
    width: int
    height: int
    pixels: np.ndarray  # (height, width, 3) uint8, row-major
    timestamp: float | None = None
    stem: str | None = None  # source filename stem, kept for label pairing

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("frame dimensions must be positive")
        if self.pixels.shape != (self.height, self.width, 3):
            raise ValueError(
                f"raster shape {self.pixels.shape} does not match "
                f"{self.height}x{self.width}x3"
            )
        if self.pixels.dtype != np.uint8:
            raise ValueError("raster must be uint8")


@dataclass(frozen=True, eq=False)
class GrayFrame:
    """8-bit luma plane of one frame."""

    index: int
    width: int
    height: int
    intensities: np.ndarray  # (height, width) uint8

    def __post_init__(self):
        if self.intensities.shape != (self.height, self.width):
            raise ValueError("luma plane shape does not match dimensions")
        if self.intensities.dtype != np.uint8:
            raise ValueError("luma plane must be uint8")


@dataclass(frozen=True, eq=False)
class FrameSequence:
    """Ordered, dimension-uniform frames of one video."""

    frames: tuple[Frame, ...]
    fps: float = DEFAULT_FPS
    source_id: str = ""

    def __post_init__(self):
        if len(self.frames) < 1:
            raise EmptySequence("a sequence needs at least one frame")
        w, h = self.frames[0].width, self.frames[0].height
        for i, frame in enumerate(self.frames):
            if frame.index != i:
                raise ValueError(f"frame at position {i} carries index {frame.index}")
            if (frame.width, frame.height) != (w, h):
                raise DimensionMismatch(
                    f"frame {i} is {frame.width}x{frame.height}, expected {w}x{h}"
                )

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height

    def stems(self) -> list[str]:
        """Per-frame filename stems (zero-padded indices when unknown)."""
        return [f.stem if f.stem is not None else f"{f.index:06d}" for f in self.frames]


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in pixel coordinates, corners (x_min,y_min)-(x_max,y_max)."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        for v in (self.x_min, self.y_min, self.x_max, self.y_max):
            if not np.isfinite(v):
                raise RangeError(f"box coordinate {v!r} is not finite")
            if v < 0:
                raise RangeError(f"box coordinate {v!r} is negative")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise RangeError(
                f"degenerate box ({self.x_min}, {self.y_min}, {self.x_max}, {self.y_max})"
            )

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)


@dataclass(frozen=True)
class Annotation:
    """Ground-truth box for one object on one frame."""

    frame_index: int
    class_id: int
    box: BoundingBox
    source: str = MODEL_ACCEPTED  # model_accepted | human_corrected

    def __post_init__(self):
        if self.source not in (MODEL_ACCEPTED, HUMAN_CORRECTED):
            raise ValueError(f"unknown annotation source {self.source!r}")


@dataclass(frozen=True)
class Prediction:
    """Scored detector box for one object on one frame."""

    frame_index: int
    class_id: int
    box: BoundingBox
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise RangeError(f"confidence {self.confidence} outside [0, 1]")


@dataclass(frozen=True, eq=False)
class AnnotationSet:
    """Ground-truth boxes grouped by frame index."""

    by_frame: Mapping[int, tuple[Annotation, ...]]
    class_names: Mapping[int, str] = field(default_factory=dict)

    def for_frame(self, index: int) -> tuple[Annotation, ...]:
        return self.by_frame.get(index, ())

    def class_ids(self) -> list[int]:
        """Class ids present, ascending."""
        return sorted({a.class_id for anns in self.by_frame.values() for a in anns})

    def __len__(self) -> int:
        return sum(len(v) for v in self.by_frame.values())


@dataclass(frozen=True, eq=False)
class PredictionSet:
    """Detector outputs grouped by frame index, within-frame order preserved."""

    by_frame: Mapping[int, tuple[Prediction, ...]]
    class_names: Mapping[int, str] = field(default_factory=dict)

    def for_frame(self, index: int) -> tuple[Prediction, ...]:
        return self.by_frame.get(index, ())

    def class_ids(self) -> list[int]:
        return sorted({p.class_id for preds in self.by_frame.values() for p in preds})

    def __len__(self) -> int:
        return sum(len(v) for v in self.by_frame.values())

    def above_confidence(self, conf_min: float) -> "PredictionSet":
        """Drop predictions scored below ``conf_min`` (floor is inclusive)."""
        kept = {
            i: tuple(p for p in preds if p.confidence >= conf_min)
            for i, preds in self.by_frame.items()
        }
        return PredictionSet(
            by_frame={i: v for i, v in kept.items() if v},
            class_names=dict(self.class_names),
        )


def frame_files(path: str | Path) -> list[Path]:
    """Resolve a frame source to its ordered image files.

    ``path`` is either a directory (lexicographic order, unless it contains a
    ``frames.txt`` manifest whose order is authoritative) or a manifest file.
    """
    path = Path(path)
    if path.is_file():
        files = _read_manifest(path, path.parent)
    else:
        manifest = path / "frames.txt"
        if manifest.is_file():
            files = _read_manifest(manifest, path)
        else:
            files = sorted(
                p for p in path.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES
            )
    if not files:
        raise EmptySequence(f"no frames found under {path}")
    return files


def load_sequence(path: str | Path, fps: float = DEFAULT_FPS) -> FrameSequence:
    """Decode a directory (or ``frames.txt`` manifest) into a FrameSequence.

    A manifest, when present, fixes the frame order; otherwise image files are
    taken in lexicographic order. All frames must share one resolution.
    """
    files = frame_files(path)
    frames: list[Frame] = []
    size: tuple[int, int] | None = None
    for index, file in enumerate(files):
        try:
            with Image.open(file) as img:
                rgb = img.convert("RGB")
                pixels = np.asarray(rgb, dtype=np.uint8)
        except (UnidentifiedImageError, OSError) as exc:
            raise DecodeError(str(file), str(exc)) from exc
        h, w = pixels.shape[:2]
        if size is None:
            size = (w, h)
        elif (w, h) != size:
            raise DimensionMismatch(
                f"{file.name} is {w}x{h}, expected {size[0]}x{size[1]}"
            )
        frames.append(
            Frame(
                index=index,
                width=w,
                height=h,
                pixels=pixels,
                timestamp=index / fps if fps > 0 else None,
                stem=file.stem,
            )
        )
    return FrameSequence(frames=tuple(frames), fps=fps, source_id=str(path))


def load_sequence_with_files(
    path: str | Path, fps: float = DEFAULT_FPS
) -> tuple[FrameSequence, list[Path]]:
    """load_sequence plus the resolved per-frame file paths (same order)."""
    files = frame_files(path)
    seq = load_sequence(path, fps=fps)
    return seq, files


def _read_manifest(manifest: Path, root: Path) -> list[Path]:
    files = []
    for line in manifest.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        files.append(root / line)
    for f in files:
        if not f.is_file():
            raise DecodeError(str(f), "listed in manifest but missing")
    return files


# BT.601 luma, integer round-half-up: coefficients scaled by 1000 sum to 1000,
# so gray inputs (r=g=b) map to themselves and 255 stays 255 without clamping.
_LUMA_WEIGHTS = np.array([299, 587, 114], dtype=np.uint32)


def to_grayscale(frame: Frame) -> GrayFrame:
    """Convert one RGB frame to its 8-bit luma plane."""
    weighted = frame.pixels.astype(np.uint32) @ _LUMA_WEIGHTS
    luma = ((weighted + 500) // 1000).astype(np.uint8)
    return GrayFrame(
        index=frame.index, width=frame.width, height=frame.height, intensities=luma
    )


def grayscale_sequence(seq: FrameSequence) -> list[GrayFrame]:
    """Luma planes for every frame, in index order."""
    return [to_grayscale(f) for f in seq.frames]


def load_annotations(
    path: str | Path,
    image_width: int,
    image_height: int,
    stems: Sequence[str] | None = None,
    class_names: Mapping[int, str] | None = None,
) -> AnnotationSet:
    """Parse a directory of normalized label files into pixel-space annotations.

    Each ``<stem>.txt`` holds ``class_id cx cy w h`` lines with center/size in
    [0, 1]. The stem resolves to a frame index either through ``stems`` (the
    sequence's filename stems, position = index) or, when omitted, by parsing
    the stem as a decimal integer. Frames without a file simply have no boxes.
    """
    path = Path(path)
    stem_to_index = (
        {stem: i for i, stem in enumerate(stems)} if stems is not None else None
    )
    by_frame: dict[int, list[Annotation]] = {}
    for file in sorted(path.glob("*.txt")):
        if stem_to_index is not None:
            if file.stem not in stem_to_index:
                continue  # not a frame of this sequence (e.g. stray notes file)
            frame_index = stem_to_index[file.stem]
        else:
            try:
                frame_index = int(file.stem)
            except ValueError:
                raise ParseError(
                    str(file), 0, f"stem {file.stem!r} is not a frame index"
                )
        entries = by_frame.setdefault(frame_index, [])
        for line_no, raw in enumerate(file.read_text().splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            entries.append(
                _parse_label_line(
                    line, str(file), line_no, frame_index, image_width, image_height
                )
            )
    return AnnotationSet(
        by_frame={i: tuple(v) for i, v in by_frame.items()},
        class_names=dict(class_names or {}),
    )


def _parse_label_line(
    line: str, path: str, line_no: int, frame_index: int, width: int, height: int
) -> Annotation:
    parts = line.split()
    if len(parts) != 5:
        raise ParseError(path, line_no, f"expected 5 fields, got {len(parts)}")
    try:
        class_id = int(parts[0])
        cx, cy, w, h = (float(p) for p in parts[1:])
    except ValueError as exc:
        raise ParseError(path, line_no, f"non-numeric field: {exc}") from exc
    for name, v in (("cx", cx), ("cy", cy), ("w", w), ("h", h)):
        if not 0.0 <= v <= 1.0:
            raise RangeError(f"{path}:{line_no}: {name}={v} outside [0, 1]")
    box = normalized_to_box(cx, cy, w, h, width, height)
    return Annotation(frame_index=frame_index, class_id=class_id, box=box)


def normalized_to_box(
    cx: float, cy: float, w: float, h: float, image_width: int, image_height: int
) -> BoundingBox:
    """Normalized center/size to a pixel BoundingBox, clipped to the image."""
    x_min = (cx - w / 2.0) * image_width
    y_min = (cy - h / 2.0) * image_height
    x_max = (cx + w / 2.0) * image_width
    y_max = (cy + h / 2.0) * image_height
    # Boxes hugging an edge may overhang by float residue; clip, keep validity.
    return BoundingBox(
        x_min=max(0.0, x_min),
        y_min=max(0.0, y_min),
        x_max=min(float(image_width), x_max),
        y_max=min(float(image_height), y_max),
    )


def box_to_normalized(
    box: BoundingBox, image_width: int, image_height: int
) -> tuple[float, float, float, float]:
    """Pixel box back to normalized (cx, cy, w, h)."""
    cx = (box.x_min + box.x_max) / 2.0 / image_width
    cy = (box.y_min + box.y_max) / 2.0 / image_height
    w = (box.x_max - box.x_min) / image_width
    h = (box.y_max - box.y_min) / image_height
    return cx, cy, w, h


def load_predictions(
    path: str | Path, class_names: Mapping[int, str] | None = None
) -> PredictionSet:
    """Parse a newline-delimited prediction file.

    Record layout: ``frame_index class_id confidence x_min y_min x_max y_max``
    (space-separated, pixel coordinates, decimal confidence in [0, 1]).
    """
    path = Path(path)
    by_frame: dict[int, list[Prediction]] = {}
    for line_no, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 7:
            raise ParseError(str(path), line_no, f"expected 7 fields, got {len(parts)}")
        try:
            frame_index = int(parts[0])
            class_id = int(parts[1])
            confidence = float(parts[2])
            coords = tuple(float(p) for p in parts[3:])
        except ValueError as exc:
            raise ParseError(str(path), line_no, f"non-numeric field: {exc}") from exc
        if not 0.0 <= confidence <= 1.0:
            raise RangeError(f"{path}:{line_no}: confidence {confidence} outside [0, 1]")
        box = BoundingBox(*coords)
        by_frame.setdefault(frame_index, []).append(
            Prediction(
                frame_index=frame_index,
                class_id=class_id,
                box=box,
                confidence=confidence,
            )
        )
    return PredictionSet(
        by_frame={i: tuple(v) for i, v in by_frame.items()},
        class_names=dict(class_names or {}),
    )


def save_predictions(preds: Iterable[Prediction], path: str | Path) -> None:
    """Write predictions in the load_predictions record layout."""
    lines = [
        f"{p.frame_index} {p.class_id} {p.confidence!r} "
        f"{p.box.x_min!r} {p.box.y_min!r} {p.box.x_max!r} {p.box.y_max!r}"
        for p in preds
    ]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))
