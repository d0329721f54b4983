"""Frame-selection strategies under a label budget.

Three plans are supported: every-k-th frame (uniform), top motion-energy
frames ranked by grayscale frame difference, and a seeded random baseline.
Plans serialize to a small text format that round-trips exactly.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from .errors import (
    EmptyBudget,
    InvalidFraction,
    ParseError,
    SequenceTooShort,
)
from .ingest import FrameSequence, to_grayscale

Strategy = Literal["uniform", "frame_diff", "random"]

STRATEGIES: tuple[Strategy, ...] = ("uniform", "frame_diff", "random")

# Guard against float residue in 1/P and P*N (e.g. 0.333*140 = 46.62000...05)
# without disturbing genuinely sub-half products.
_EPS = 1e-9


@dataclass(frozen=True)
class SamplingPlan:
    """Strategy-tagged, budget-tagged ordered set of selected frame indices."""

    strategy: Strategy
    fraction: float
    selected: tuple[int, ...]
    total_frames: int
    seed: int | None = None

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        prev = -1
        for idx in self.selected:
            if not 0 <= idx < self.total_frames:
                raise ValueError(f"index {idx} outside [0, {self.total_frames})")
            if idx <= prev:
                raise ValueError("selected indices must be strictly increasing")
            prev = idx
        if not self.selected:
            raise EmptyBudget(
                f"fraction {self.fraction} selects no frames out of {self.total_frames}"
            )

    def __len__(self) -> int:
        return len(self.selected)

    def held_out(self) -> tuple[int, ...]:
        """Frame indices NOT selected, ascending."""
        chosen = set(self.selected)
        return tuple(i for i in range(self.total_frames) if i not in chosen)


@dataclass(frozen=True)
class DiffSeries:
    """Per-frame motion energy D_t for t = 1..N-1 (frame 0 has no predecessor)."""

    values: tuple[int, ...]
    total_frames: int

    def __post_init__(self):
        if len(self.values) != self.total_frames - 1:
            raise ValueError("diff series must have one value per frame pair")
        if any(v < 0 for v in self.values):
            raise ValueError("diff values cannot be negative")

    def value_at(self, t: int) -> int:
        """D_t for frame t (t >= 1)."""
        return self.values[t - 1]


def _check_fraction(fraction: float) -> None:
    if not 0.0 < fraction <= 1.0:
        raise InvalidFraction(f"fraction {fraction} outside (0, 1]")


def _budget(total_frames: int, fraction: float) -> int:
    """round(P*N), half away from zero, with a float-noise guard."""
    return int(math.floor(fraction * total_frames + 0.5 + _EPS))


def uniform_sample(total_frames: int, fraction: float) -> SamplingPlan:
    """Select every floor(1/P)-th frame starting at 0."""
    _check_fraction(fraction)
    if total_frames < 1:
        raise ValueError("total_frames must be >= 1")
    stride = int(math.floor(1.0 / fraction + _EPS))
    return SamplingPlan(
        strategy="uniform",
        fraction=fraction,
        selected=tuple(range(0, total_frames, stride)),
        total_frames=total_frames,
    )


def frame_diff_series(seq: FrameSequence) -> DiffSeries:
    """Total absolute grayscale change between each frame and its predecessor.

    Exact integer arithmetic; D_t is attributed to the later frame t.
    """
    if len(seq) < 2:
        raise SequenceTooShort("frame differencing needs at least 2 frames")
    values = []
    prev = to_grayscale(seq.frames[0]).intensities.astype(np.int64)
    for frame in seq.frames[1:]:
        cur = to_grayscale(frame).intensities.astype(np.int64)
        values.append(int(np.abs(cur - prev).sum()))
        prev = cur
    return DiffSeries(values=tuple(values), total_frames=len(seq))


def diff_sample(diffs: DiffSeries, fraction: float) -> SamplingPlan:
    """Select the top round(P*N) frames by D_t; ties go to the earlier frame.

    Frame 0 has no difference value and is never selectable, so a full budget
    yields N-1 frames.
    """
    _check_fraction(fraction)
    n = diffs.total_frames
    k = _budget(n, fraction)
    if k == 0:
        raise EmptyBudget(f"fraction {fraction} selects no frames out of {n}")
    k = min(k, n - 1)
    ranked = sorted(range(1, n), key=lambda t: (-diffs.value_at(t), t))
    return SamplingPlan(
        strategy="frame_diff",
        fraction=fraction,
        selected=tuple(sorted(ranked[:k])),
        total_frames=n,
    )


def random_sample(total_frames: int, fraction: float, seed: int) -> SamplingPlan:
    """Draw round(P*N) distinct frames with a seeded Mersenne Twister.

    Uses CPython's random.Random.sample, whose seeded stream is stable across
    platforms, so a (N, P, seed) triple always yields the same plan.
    """
    _check_fraction(fraction)
    if total_frames < 1:
        raise ValueError("total_frames must be >= 1")
    k = _budget(total_frames, fraction)
    if k == 0:
        raise EmptyBudget(
            f"fraction {fraction} selects no frames out of {total_frames}"
        )
    k = min(k, total_frames)
    rng = random.Random(seed)
    return SamplingPlan(
        strategy="random",
        fraction=fraction,
        selected=tuple(sorted(rng.sample(range(total_frames), k))),
        total_frames=total_frames,
        seed=seed,
    )


def export_plan(plan: SamplingPlan, path: str | Path) -> None:
    """Write a plan file: one header line, then one frame index per line."""
    lines = [
        f"# strategy={plan.strategy} fraction={plan.fraction!r} "
        f"seed={plan.seed if plan.seed is not None else '-'} total={plan.total_frames}"
    ]
    lines.extend(str(i) for i in plan.selected)
    Path(path).write_text("\n".join(lines) + "\n")


def import_plan(path: str | Path) -> SamplingPlan:
    """Read a plan file written by export_plan; inverse up to equality."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ParseError(str(path), 1, "missing plan header")
    fields = dict(
        part.split("=", 1) for part in lines[0][2:].split() if "=" in part
    )
    try:
        strategy = fields["strategy"]
        fraction = float(fields["fraction"])
        seed = None if fields["seed"] == "-" else int(fields["seed"])
        total = int(fields["total"])
    except (KeyError, ValueError) as exc:
        raise ParseError(str(path), 1, f"bad plan header: {exc}") from exc
    selected = []
    for line_no, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        try:
            selected.append(int(line))
        except ValueError as exc:
            raise ParseError(str(path), line_no, f"bad frame index: {exc}") from exc
    if strategy not in STRATEGIES:
        raise ParseError(str(path), 1, f"unknown strategy {strategy!r}")
    return SamplingPlan(
        strategy=strategy,  # type: ignore[arg-type]
        fraction=fraction,
        selected=tuple(selected),
        total_frames=total,
        seed=seed,
    )


def export_frame_list(
    plan: SamplingPlan, filenames: Sequence[str], path: str | Path
) -> None:
    """Write the selected frames' filenames, one per line, for a trainer."""
    if len(filenames) != plan.total_frames:
        raise ValueError(
            f"{len(filenames)} filenames for a plan over {plan.total_frames} frames"
        )
    Path(path).write_text("\n".join(filenames[i] for i in plan.selected) + "\n")
