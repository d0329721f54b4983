"""Text serialization of evaluation and stability reports.

Every report ships in two forms: a human-readable aligned table and a
machine-readable ``key=value`` file. Formatting is fixed-precision so
identical inputs always produce byte-identical files.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

from .metrics import EvalReport
from .stability import LipschitzReport

EVAL_COLUMNS = ("Strategy", "P", "Precision", "Recall", "mAP@0.5")
LIPSCHITZ_COLUMNS = ("Strategy", "P", "K_50", "K_90", "K_95", "K_99")


def format_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Space-aligned table with a dashed rule under the header."""
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    def fmt(cells: Sequence[str]) -> str:
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    lines = [fmt(headers), fmt(["-" * w for w in widths])]
    lines.extend(fmt(row) for row in rows)
    return "\n".join(lines) + "\n"


def format_kv(pairs: Mapping[str, object]) -> str:
    """One ``key=value`` line per entry, floats at full round-trip precision."""
    lines = []
    for key, value in pairs.items():
        if isinstance(value, float):
            lines.append(f"{key}={value!r}")
        else:
            lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"


def write_report(path: str | Path, table: str, kv: Mapping[str, object]) -> None:
    """Write ``<path>.txt`` (table) and ``<path>.kv`` (key-value) siblings."""
    base = Path(path)
    base.with_suffix(base.suffix + ".txt").write_text(table)
    base.with_suffix(base.suffix + ".kv").write_text(format_kv(kv))


def eval_report_table(report: EvalReport) -> str:
    """Per-class metrics table plus the evaluation conventions header."""
    header = (
        f"# iou_threshold={report.iou_threshold!r} conf_min={report.conf_min!r}\n"
        "# conventions: precision with no predictions = 1.0; "
        "empty-frame IoU = 1.0; AP all-point interpolation\n"
    )
    rows = []
    for c in sorted(report.per_class_ap):
        rows.append(
            (
                report.class_label(c),
                f"{report.per_class_precision[c]:.5f}",
                f"{report.per_class_recall[c]:.5f}",
                f"{report.per_class_ap[c]:.5f}",
            )
        )
    rows.append(("mAP@0.5", "", "", f"{report.map50:.5f}"))
    return header + format_table(("Class", "Precision", "Recall", "AP@0.5"), rows)


def eval_report_kv(report: EvalReport) -> dict[str, object]:
    kv: dict[str, object] = {
        "iou_threshold": report.iou_threshold,
        "conf_min": report.conf_min,
        "tp": report.tp,
        "fp": report.fp,
        "fn": report.fn,
        "map50": report.map50,
    }
    for c in sorted(report.per_class_ap):
        kv[f"class{c}.precision"] = report.per_class_precision[c]
        kv[f"class{c}.recall"] = report.per_class_recall[c]
        kv[f"class{c}.ap50"] = report.per_class_ap[c]
    if report.skipped_classes:
        kv["skipped_classes"] = ",".join(str(c) for c in report.skipped_classes)
    return kv


def lipschitz_report_table(report: LipschitzReport) -> str:
    header = (
        f"# pairs={report.mode} samples={report.sample_count} "
        f"dropped_zero_denominator={report.dropped_zero_denominator_count}\n"
    )
    levels = sorted(report.percentiles)
    rows = [tuple(f"{report.percentiles[q]:.3f}" for q in levels)]
    return header + format_table(tuple(f"K_{q}" for q in levels), rows)


def lipschitz_report_kv(report: LipschitzReport) -> dict[str, object]:
    kv: dict[str, object] = {
        "pairs": report.mode,
        "samples": report.sample_count,
        "dropped_zero_denominator": report.dropped_zero_denominator_count,
    }
    for q in sorted(report.percentiles):
        kv[f"k{q}"] = report.percentiles[q]
    return kv
