"""Append-only mutation journal with crash-safe replay.

One JSON record per line. Every append is flushed and fsynced before the
caller acknowledges the mutation, so an acknowledged correction survives a
crash. A torn final line (crash mid-write) is ignored on replay: the
mutation was never acknowledged.
"""

from __future__ import annotations

import json
import os
from pathlib import Path


class Journal:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "a", encoding="utf-8")

    def append(self, record: dict) -> None:
        """Durably append one mutation record."""
        line = json.dumps(record, sort_keys=True, separators=(",", ":"))
        self._fh.write(line + "\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())

    def compact(self, records: list[dict]) -> None:
        """Atomically replace the journal with a minimal record list."""
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            for record in records:
                fh.write(json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        self._fh.close()
        os.replace(tmp, self.path)
        self._fh = open(self.path, "a", encoding="utf-8")

    def close(self) -> None:
        self._fh.close()


def replay_journal(path: str | Path) -> list[dict]:
    """Read journal records in append order; a torn final line is dropped."""
    path = Path(path)
    if not path.exists():
        return []
    records = []
    lines = path.read_text(encoding="utf-8").split("\n")
    for pos, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError:
            if pos >= len(lines) - 2:  # unterminated tail write
                break
            raise
    return records
