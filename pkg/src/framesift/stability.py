"""Temporal-stability analysis of per-frame prediction quality.

For a per-frame IoU curve f and grayscale frames x, the empirical stability
statistic is the q-th percentile of |f(x_i) - f(x_j)| / ||x_i - x_j|| over
frame pairs, where ||.|| is the mean absolute pixel difference (so the value
is resolution-independent). Identical-frame pairs have no defined quotient
and are dropped but counted.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, NoSamples, SequenceTooShort
from .ingest import FrameSequence, GrayFrame, grayscale_sequence
from .metrics import IoUCurve

PairMode = Literal["all_pairs", "consecutive"]

PAIR_MODES: tuple[PairMode, ...] = ("all_pairs", "consecutive")

DEFAULT_LEVELS = (50, 90, 95, 99)


def frame_distance(a: GrayFrame, b: GrayFrame) -> float:
    """Mean absolute intensity difference between two same-size luma planes."""
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionMismatch(
            f"{a.width}x{a.height} vs {b.width}x{b.height} luma planes"
        )
    total = int(
        np.abs(a.intensities.astype(np.int64) - b.intensities.astype(np.int64)).sum()
    )
    return total / (a.width * a.height)


@dataclass(frozen=True)
class QuotientSample:
    """One frame pair's |IoU delta| / frame distance quotient."""

    i: int
    j: int
    numerator: float
    denominator: float
    quotient: float

    def __post_init__(self):
        if self.i >= self.j:
            raise ValueError("pair indices must satisfy i < j")
        if self.denominator <= 0:
            raise ValueError("retained samples need a positive denominator")

    @classmethod
    def from_parts(cls, i: int, j: int, numerator: float, denominator: float):
        return cls(i, j, numerator, denominator, numerator / denominator)


@dataclass(frozen=True)
class QuotientSet:
    """Retained quotient samples plus the zero-denominator drop count."""

    samples: tuple[QuotientSample, ...]
    dropped_zero_denominator: int
    mode: PairMode


@dataclass(frozen=True, eq=False)
class LipschitzReport:
    """Quantiles of the quotient distribution at the requested levels."""

    mode: PairMode
    percentiles: Mapping[int, float]
    sample_count: int
    dropped_zero_denominator_count: int

    def __post_init__(self):
        levels = sorted(self.percentiles)
        ks = [self.percentiles[q] for q in levels]
        if any(k < 0 for k in ks):
            raise ValueError("stability quantiles cannot be negative")
        if any(a > b for a, b in zip(ks, ks[1:])):
            raise ValueError("quantiles must be non-decreasing in the level")


def lipschitz_quotients(
    curve: IoUCurve,
    grays: Mapping[int, GrayFrame] | Sequence[GrayFrame],
    mode: PairMode = "all_pairs",
) -> QuotientSet:
    """Quotient samples over the curve's frame pairs.

    ``all_pairs`` visits every i < j combination; ``consecutive`` only
    adjacent entries of the curve's frame list. ``grays`` maps frame index to
    luma plane (a full-sequence list works too).
    """
    if mode not in PAIR_MODES:
        raise ValueError(f"unknown pair mode {mode!r}")
    if len(curve) < 2:
        raise SequenceTooShort("need at least 2 evaluated frames to form pairs")
    lookup = _gray_lookup(grays)
    frames = curve.frames
    values = curve.values
    if mode == "consecutive":
        positions = [(t - 1, t) for t in range(1, len(frames))]
    else:
        positions = [
            (a, b) for a in range(len(frames)) for b in range(a + 1, len(frames))
        ]
    samples: list[QuotientSample] = []
    dropped = 0
    for a, b in positions:
        i, j = frames[a], frames[b]
        denominator = frame_distance(lookup[i], lookup[j])
        if denominator == 0.0:
            dropped += 1
            continue
        numerator = abs(values[a] - values[b])
        samples.append(QuotientSample.from_parts(i, j, numerator, denominator))
    return QuotientSet(
        samples=tuple(samples), dropped_zero_denominator=dropped, mode=mode
    )


def _gray_lookup(
    grays: Mapping[int, GrayFrame] | Sequence[GrayFrame]
) -> Mapping[int, GrayFrame]:
    if isinstance(grays, Mapping):
        return grays
    return {g.index: g for g in grays}


def grayscale_map(seq: FrameSequence) -> dict[int, GrayFrame]:
    """Frame-index-keyed luma planes for a whole sequence."""
    return {g.index: g for g in grayscale_sequence(seq)}


def quantile(values: Sequence[float], q: float) -> float:
    """Linear-interpolation quantile of unsorted values, q in [0, 100].

    Position h = (n-1) * q/100; result interpolates between the two nearest
    order statistics.
    """
    if not values:
        raise NoSamples("quantile of zero samples is undefined")
    if not 0.0 <= q <= 100.0:
        raise ValueError(f"quantile level {q} outside [0, 100]")
    ordered = sorted(values)
    n = len(ordered)
    h = (n - 1) * (q / 100.0)
    lo = int(h)
    frac = h - lo
    if lo + 1 >= n:
        return ordered[-1]
    return ordered[lo] + frac * (ordered[lo + 1] - ordered[lo])


def quantiles(
    quotients: QuotientSet | Sequence[QuotientSample],
    levels: Sequence[int] = DEFAULT_LEVELS,
) -> LipschitzReport:
    """Stability report: quotient quantiles at the requested percent levels."""
    if isinstance(quotients, QuotientSet):
        samples = quotients.samples
        dropped = quotients.dropped_zero_denominator
        mode = quotients.mode
    else:
        samples = tuple(quotients)
        dropped = 0
        mode = "all_pairs"
    if not samples:
        raise NoSamples("no retained quotient samples")
    values = [s.quotient for s in samples]
    return LipschitzReport(
        mode=mode,
        percentiles={int(q): quantile(values, q) for q in levels},
        sample_count=len(samples),
        dropped_zero_denominator_count=dropped,
    )


def export_quotients(quotients: QuotientSet, path: str | Path) -> None:
    """Raw ``i j numerator denominator quotient`` dump, one pair per line."""
    lines = [
        f"{s.i} {s.j} {s.numerator!r} {s.denominator!r} {s.quotient!r}"
        for s in quotients.samples
    ]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))
