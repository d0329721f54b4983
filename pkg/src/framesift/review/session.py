"""Review-session state: per-frame status, corrections, journaling, export.

Status transitions are restricted to unreviewed -> accepted,
unreviewed -> corrected, and corrected -> corrected (re-edits). Mutations go
to the journal before touching in-memory state, so acknowledged state always
survives a restart; concurrent writers serialize on one lock and the newest
timestamp wins per frame (append order equals time order in one journal).
"""

from __future__ import annotations

import json
import threading
import time
from pathlib import Path

from ..errors import NothingToExport, RangeError
from ..ingest import (
    HUMAN_CORRECTED,
    MODEL_ACCEPTED,
    Annotation,
    BoundingBox,
    FrameSequence,
    PredictionSet,
    box_to_normalized,
)
from ..sampling import SamplingPlan
from .journal import Journal, replay_journal

UNREVIEWED = "unreviewed"
ACCEPTED = "accepted"
CORRECTED = "corrected"

STATUSES = (UNREVIEWED, ACCEPTED, CORRECTED)


class InvalidTransition(RangeError):
    """A status change outside the allowed transition set."""


class ReviewSession:
    """Journal-backed correction state for one sampling plan."""

    def __init__(
        self,
        plan: SamplingPlan,
        sequence: FrameSequence,
        predictions: PredictionSet | None = None,
        journal_path: str | Path = "review_journal.jsonl",
    ):
        for idx in plan.selected:
            if idx >= len(sequence):
                raise ValueError(f"plan frame {idx} beyond sequence of {len(sequence)}")
        self.plan = plan
        self.sequence = sequence
        self.predictions = predictions or PredictionSet(by_frame={})
        self._status: dict[int, str] = {i: UNREVIEWED for i in plan.selected}
        self._corrections: dict[int, tuple[Annotation, ...]] = {}
        self._mutated_at: dict[int, float] = {}
        self._lock = threading.Lock()
        existing = replay_journal(journal_path)
        self.journal = Journal(journal_path)
        for record in existing:
            self._apply(record)

    # -- queries ---------------------------------------------------------

    def status(self, frame: int) -> str:
        if frame not in self._status:
            raise KeyError(f"frame {frame} is not part of the plan")
        return self._status[frame]

    def counts(self) -> dict[str, int]:
        tally = {s: 0 for s in STATUSES}
        for status in self._status.values():
            tally[status] += 1
        return tally

    def corrections(self, frame: int) -> tuple[Annotation, ...] | None:
        """Correction boxes for a frame, or None when never corrected."""
        return self._corrections.get(frame)

    def effective_annotations(self, frame: int) -> tuple[Annotation, ...]:
        """Labels this frame would export right now."""
        status = self.status(frame)
        if status == CORRECTED:
            return self._corrections[frame]
        if status == ACCEPTED:
            return tuple(
                Annotation(
                    frame_index=frame,
                    class_id=p.class_id,
                    box=p.box,
                    source=MODEL_ACCEPTED,
                )
                for p in self.predictions.for_frame(frame)
            )
        return ()

    def next_frame(self, after: int = -1, status: str = UNREVIEWED) -> int | None:
        """Next plan frame with the given status, wrapping past the plan end."""
        if status not in STATUSES:
            raise ValueError(f"unknown status {status!r}")
        ordered = self.plan.selected
        later = [i for i in ordered if i > after and self._status[i] == status]
        if later:
            return later[0]
        wrapped = [i for i in ordered if i <= after and self._status[i] == status]
        return wrapped[0] if wrapped else None

    # -- mutations -------------------------------------------------------

    def accept(self, frame: int) -> None:
        """Take the model predictions as this frame's labels."""
        with self._lock:
            if self.status(frame) != UNREVIEWED:
                raise InvalidTransition(
                    f"frame {frame} is {self.status(frame)}; accept needs unreviewed"
                )
            record = {"op": "accept", "frame": frame, "ts": time.time()}
            self.journal.append(record)
            self._apply(record)

    def correct(self, frame: int, boxes: list[tuple[int, BoundingBox]]) -> None:
        """Replace this frame's labels with human-entered boxes (may be empty)."""
        with self._lock:
            if self.status(frame) not in (UNREVIEWED, CORRECTED):
                raise InvalidTransition(
                    f"frame {frame} is {self.status(frame)}; correct needs "
                    "unreviewed or corrected"
                )
            record = {
                "op": "correct",
                "frame": frame,
                "boxes": [
                    {
                        "class_id": class_id,
                        "x_min": box.x_min,
                        "y_min": box.y_min,
                        "x_max": box.x_max,
                        "y_max": box.y_max,
                    }
                    for class_id, box in boxes
                ],
                "ts": time.time(),
            }
            self.journal.append(record)
            self._apply(record)

    def _apply(self, record: dict) -> None:
        frame = record["frame"]
        if frame not in self._status:
            raise ValueError(f"journal names frame {frame} outside the plan")
        if record["op"] == "accept":
            self._status[frame] = ACCEPTED
        elif record["op"] == "correct":
            self._corrections[frame] = tuple(
                Annotation(
                    frame_index=frame,
                    class_id=int(b["class_id"]),
                    box=BoundingBox(b["x_min"], b["y_min"], b["x_max"], b["y_max"]),
                    source=HUMAN_CORRECTED,
                )
                for b in record["boxes"]
            )
            self._status[frame] = CORRECTED
        else:
            raise ValueError(f"unknown journal op {record['op']!r}")
        self._mutated_at[frame] = record.get("ts", 0.0)

    # -- export ----------------------------------------------------------

    def export_labels(self, out_dir: str | Path) -> dict:
        """Write normalized label files for every reviewed frame plus a manifest.

        Returns the manifest structure. Compacts the journal afterwards.
        """
        with self._lock:
            reviewed = [
                i for i in self.plan.selected if self._status[i] != UNREVIEWED
            ]
            if not reviewed:
                raise NothingToExport("no frame has been accepted or corrected")
            out_dir = Path(out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            width, height = self.sequence.width, self.sequence.height
            stems = self.sequence.stems()
            manifest_frames = []
            for i in reviewed:
                annotations = self.effective_annotations(i)
                lines = []
                for a in annotations:
                    cx, cy, w, h = box_to_normalized(a.box, width, height)
                    lines.append(f"{a.class_id} {cx:.6f} {cy:.6f} {w:.6f} {h:.6f}")
                (out_dir / f"{stems[i]}.txt").write_text(
                    "\n".join(lines) + ("\n" if lines else "")
                )
                manifest_frames.append(
                    {
                        "frame": i,
                        "stem": stems[i],
                        "status": self._status[i],
                        "source": (
                            HUMAN_CORRECTED
                            if self._status[i] == CORRECTED
                            else MODEL_ACCEPTED
                        ),
                        "boxes": len(annotations),
                    }
                )
            manifest = {
                "plan": {
                    "strategy": self.plan.strategy,
                    "fraction": self.plan.fraction,
                    "total_frames": self.plan.total_frames,
                },
                "exported": len(reviewed),
                "frames": manifest_frames,
            }
            (out_dir / "manifest.json").write_text(
                json.dumps(manifest, indent=2, sort_keys=True) + "\n"
            )
            self.journal.compact(self._compact_records())
            return manifest

    def _compact_records(self) -> list[dict]:
        records = []
        for i in self.plan.selected:
            status = self._status[i]
            ts = self._mutated_at.get(i, 0.0)
            if status == ACCEPTED:
                records.append({"op": "accept", "frame": i, "ts": ts})
            elif status == CORRECTED:
                records.append(
                    {
                        "op": "correct",
                        "frame": i,
                        "boxes": [
                            {
                                "class_id": a.class_id,
                                "x_min": a.box.x_min,
                                "y_min": a.box.y_min,
                                "x_max": a.box.x_max,
                                "y_max": a.box.y_max,
                            }
                            for a in self._corrections[i]
                        ],
                        "ts": ts,
                    }
                )
        return records
