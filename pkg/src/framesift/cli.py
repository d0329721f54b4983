"""Command-line driver for the sampling / evaluation / stability grid.

Subcommands:
  sample     write plan files for every (strategy, fraction, seed) combination
  eval       score per-combination prediction files against ground truth
  lipschitz  stability quantiles over held-out frames per combination
  diffplot   dump the motion-energy series as ``t D_t`` lines
  serve      run the box-review service for one plan

A flat key-value config file (``key = value``, one per line) can supply any
flag; explicit flags win. Exit codes: 0 all combinations succeeded, 1 usage
or config error, 2 one or more combinations failed.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import reports
from .errors import FramesiftError, MissingPredictions
from .ingest import (
    FrameSequence,
    load_annotations,
    load_predictions,
    load_sequence_with_files,
)
from .metrics import evaluate, export_iou_curve, per_frame_iou_curve
from .sampling import (
    STRATEGIES,
    SamplingPlan,
    diff_sample,
    export_frame_list,
    export_plan,
    frame_diff_series,
    random_sample,
    uniform_sample,
)
from .stability import (
    PAIR_MODES,
    grayscale_map,
    export_quotients,
    lipschitz_quotients,
    quantiles,
)

DEFAULT_RUNS = 5
DEFAULT_LEVELS = (50, 90, 95, 99)

SUMMARY_NOTE = (
    "# conventions: P shown as percent; random rows average their runs;\n"
    "# uniform budgets use stride floor(1/P) (cardinality within 1 of round(P*N))\n"
)


class CliError(FramesiftError):
    """Usage or configuration problem (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; spec wants 1
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class Combo:
    """One experiment grid cell."""

    strategy: str
    fraction: float
    seed: int | None

    @property
    def stem(self) -> str:
        seed = "-" if self.seed is None else str(self.seed)
        return f"{self.strategy}_p{self.fraction:g}_s{seed}"

    @property
    def label(self) -> str:
        return self.stem


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` lines; '#' starts a comment."""
    values: dict[str, str] = {}
    for line_no, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{line_no}: expected 'key = value'")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _split_list(value: str) -> list[str]:
    return [item for item in (part.strip() for part in value.split(",")) if item]


def parse_strategies(value: str) -> list[str]:
    strategies = _split_list(value)
    for s in strategies:
        if s not in STRATEGIES:
            raise CliError(f"unknown strategy {s!r} (choose from {', '.join(STRATEGIES)})")
    if not strategies:
        raise CliError("no strategy given")
    return strategies


def parse_fractions(value: str) -> list[float]:
    try:
        fractions = [float(v) for v in _split_list(value)]
    except ValueError as exc:
        raise CliError(f"bad fraction list {value!r}: {exc}")
    if not fractions:
        raise CliError("no fraction given")
    return fractions


def parse_seeds(value: str) -> list[int]:
    try:
        return [int(v) for v in _split_list(value)]
    except ValueError as exc:
        raise CliError(f"bad seed list {value!r}: {exc}")


def build_combos(
    strategies: Sequence[str],
    fractions: Sequence[float],
    seeds: Sequence[int],
) -> list[Combo]:
    """Grid cells ordered by canonical strategy order, then ascending P."""
    combos = []
    for strategy in STRATEGIES:
        if strategy not in strategies:
            continue
        for fraction in sorted(fractions):
            if strategy == "random":
                combos.extend(Combo(strategy, fraction, s) for s in seeds)
            else:
                combos.append(Combo(strategy, fraction, None))
    return combos


def make_plan(combo: Combo, seq: FrameSequence, diffs=None) -> SamplingPlan:
    if combo.strategy == "uniform":
        return uniform_sample(len(seq), combo.fraction)
    if combo.strategy == "frame_diff":
        return diff_sample(diffs if diffs is not None else frame_diff_series(seq), combo.fraction)
    return random_sample(len(seq), combo.fraction, combo.seed or 0)


def _percent(fraction: float) -> str:
    return f"{fraction * 100:g}"


class GridRunner:
    """Runs one action per combination, isolating failures."""

    def __init__(self):
        self.failures: list[tuple[Combo, Exception]] = []

    def run(self, combo: Combo, action) -> object | None:
        try:
            return action()
        except (FramesiftError, OSError) as exc:
            self.failures.append((combo, exc))
            print(f"[fail] {combo.label}: {exc}", file=sys.stderr)
            return None

    def exit_code(self) -> int:
        if self.failures:
            print(
                f"{len(self.failures)} combination(s) failed", file=sys.stderr
            )
            return 2
        return 0


# -- sample ---------------------------------------------------------------


def cmd_sample(args) -> int:
    seq, files = load_sequence_with_files(args.frames, fps=args.fps)
    combos = build_combos(args.strategies, args.fractions, args.seeds)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    diffs = None
    if any(c.strategy == "frame_diff" for c in combos) and len(seq) >= 2:
        diffs = frame_diff_series(seq)
    filenames = [f.name for f in files]
    runner = GridRunner()
    for combo in combos:
        def do(combo=combo):
            plan = make_plan(combo, seq, diffs)
            export_plan(plan, out / f"{combo.stem}.plan")
            if args.emit_list:
                export_frame_list(plan, filenames, out / f"{combo.stem}.frames")
            print(f"[plan] {combo.label}: {len(plan)} frames")
        runner.run(combo, do)
    return runner.exit_code()


# -- eval -----------------------------------------------------------------


def _load_grid_predictions(preds_dir: Path, combo: Combo):
    path = preds_dir / f"{combo.stem}.preds"
    if not path.is_file():
        raise MissingPredictions(f"{combo.label}: no prediction file {path}")
    return load_predictions(path)


def cmd_eval(args) -> int:
    seq, _ = load_sequence_with_files(args.frames, fps=args.fps)
    gts = load_annotations(args.labels, seq.width, seq.height, stems=seq.stems())
    combos = build_combos(args.strategies, args.fractions, args.seeds)
    preds_dir = Path(args.preds)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    runner = GridRunner()
    rows: dict[tuple[str, float], list[tuple[float, float, float]]] = {}
    for combo in combos:
        def do(combo=combo):
            preds = _load_grid_predictions(preds_dir, combo)
            report = evaluate(preds, gts, iou_threshold=0.5, conf_min=args.conf_min)
            reports.write_report(
                out / f"{combo.stem}.eval",
                reports.eval_report_table(report),
                reports.eval_report_kv(report),
            )
            precision = report.tp / (report.tp + report.fp) if report.tp + report.fp else 1.0
            recall = report.tp / (report.tp + report.fn) if report.tp + report.fn else 1.0
            rows.setdefault((combo.strategy, combo.fraction), []).append(
                (precision, recall, report.map50)
            )
            print(f"[eval] {combo.label}: mAP@0.5 {report.map50:.5f}")
        runner.run(combo, do)
    _write_eval_summary(out, rows)
    return runner.exit_code()


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values)


def _write_eval_summary(
    out: Path, rows: dict[tuple[str, float], list[tuple[float, float, float]]]
) -> None:
    table_rows = []
    kv: dict[str, object] = {}
    for strategy in STRATEGIES:
        for (s, fraction), triples in sorted(
            (item for item in rows.items() if item[0][0] == strategy),
            key=lambda item: item[0][1],
        ):
            precision = _mean([t[0] for t in triples])
            recall = _mean([t[1] for t in triples])
            mean_map = _mean([t[2] for t in triples])
            table_rows.append(
                (
                    s,
                    _percent(fraction),
                    f"{precision:.5f}",
                    f"{recall:.5f}",
                    f"{mean_map:.5f}",
                )
            )
            stem = f"{s}_p{fraction:g}"
            kv[f"{stem}.precision"] = precision
            kv[f"{stem}.recall"] = recall
            kv[f"{stem}.map50"] = mean_map
            kv[f"{stem}.runs"] = len(triples)
    if not table_rows:
        return
    table = SUMMARY_NOTE + reports.format_table(reports.EVAL_COLUMNS, table_rows)
    (out / "eval_summary.txt").write_text(table)
    (out / "eval_summary.kv").write_text(reports.format_kv(kv))


# -- lipschitz --------------------------------------------------------------


def cmd_lipschitz(args) -> int:
    seq, _ = load_sequence_with_files(args.frames, fps=args.fps)
    gts = load_annotations(args.labels, seq.width, seq.height, stems=seq.stems())
    grays = grayscale_map(seq)
    combos = build_combos(args.strategies, args.fractions, args.seeds)
    preds_dir = Path(args.preds)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    diffs = None
    if any(c.strategy == "frame_diff" for c in combos) and len(seq) >= 2:
        diffs = frame_diff_series(seq)
    runner = GridRunner()
    rows: dict[tuple[str, float], list[dict[int, float]]] = {}
    for combo in combos:
        def do(combo=combo):
            plan = make_plan(combo, seq, diffs)
            frames = plan.held_out() if args.eval_frames == "heldout" else tuple(range(len(seq)))
            preds = _load_grid_predictions(preds_dir, combo)
            if args.conf_min > 0.0:
                preds = preds.above_confidence(args.conf_min)
            curve = per_frame_iou_curve(preds, gts, args.class_id, frames)
            qset = lipschitz_quotients(curve, grays, args.pairs)
            report = quantiles(qset, DEFAULT_LEVELS)
            reports.write_report(
                out / f"{combo.stem}.lipschitz",
                reports.lipschitz_report_table(report),
                reports.lipschitz_report_kv(report),
            )
            if args.dump_quotients:
                export_quotients(qset, out / f"{combo.stem}.quotients")
            if args.dump_curves:
                export_iou_curve(curve, out / f"{combo.stem}.iou")
            rows.setdefault((combo.strategy, combo.fraction), []).append(
                dict(report.percentiles)
            )
            ks = " ".join(f"K{q}={report.percentiles[q]:.3f}" for q in DEFAULT_LEVELS)
            print(f"[lipschitz] {combo.label}: {ks}")
        runner.run(combo, do)
    _write_lipschitz_summary(out, rows)
    return runner.exit_code()


def _write_lipschitz_summary(
    out: Path, rows: dict[tuple[str, float], list[dict[int, float]]]
) -> None:
    table_rows = []
    kv: dict[str, object] = {}
    for strategy in STRATEGIES:
        for (s, fraction), reports_list in sorted(
            (item for item in rows.items() if item[0][0] == strategy),
            key=lambda item: item[0][1],
        ):
            means = {
                q: _mean([r[q] for r in reports_list]) for q in DEFAULT_LEVELS
            }
            table_rows.append(
                (s, _percent(fraction), *(f"{means[q]:.3f}" for q in DEFAULT_LEVELS))
            )
            stem = f"{s}_p{fraction:g}"
            for q in DEFAULT_LEVELS:
                kv[f"{stem}.k{q}"] = means[q]
            kv[f"{stem}.runs"] = len(reports_list)
    if not table_rows:
        return
    table = SUMMARY_NOTE + reports.format_table(reports.LIPSCHITZ_COLUMNS, table_rows)
    (out / "lipschitz_summary.txt").write_text(table)
    (out / "lipschitz_summary.kv").write_text(reports.format_kv(kv))


# -- diffplot ----------------------------------------------------------------


def cmd_diffplot(args) -> int:
    seq, _ = load_sequence_with_files(args.frames, fps=args.fps)
    diffs = frame_diff_series(seq)
    lines = [f"{t} {diffs.value_at(t)}" for t in range(1, diffs.total_frames)]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# -- serve -------------------------------------------------------------------


def cmd_serve(args) -> int:
    import uvicorn

    from .review.service import create_app
    from .review.session import ReviewSession
    from .sampling import import_plan

    seq, files = load_sequence_with_files(args.frames, fps=args.fps)
    plan = import_plan(args.plan)
    predictions = load_predictions(args.preds) if args.preds else None
    session = ReviewSession(
        plan=plan,
        sequence=seq,
        predictions=predictions,
        journal_path=args.journal,
    )
    app = create_app(
        session,
        image_files=files,
        export_dir=args.export_dir,
        ui_dir=args.ui,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# -- argument wiring ----------------------------------------------------------


def _add_grid_arguments(parser, needs_labels: bool, needs_preds: bool):
    parser.add_argument("--frames", required=False, help="frame directory or manifest")
    if needs_labels:
        parser.add_argument("--labels", required=False, help="ground-truth label directory")
    if needs_preds:
        parser.add_argument("--preds", required=False, help="per-combination prediction directory")
    parser.add_argument("--strategy", required=False, help="comma list: uniform,frame_diff,random")
    parser.add_argument("--fraction", required=False, help="comma list of label budgets in (0,1]")
    parser.add_argument("--seed", required=False, help="comma list of seeds for the random strategy")
    parser.add_argument("--runs", type=int, default=None, help=f"random run count when --seed is absent (default {DEFAULT_RUNS})")
    parser.add_argument("--conf-min", type=float, default=None, help="drop predictions below this confidence (default 0.0)")
    parser.add_argument("--out", required=False, help="output directory")
    parser.add_argument("--fps", type=float, default=None, help="frames per second (default 30)")
    parser.add_argument("--config", required=False, help="flat key=value config file; flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="framesift", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_sample = sub.add_parser("sample", help="write sampling plans")
    _add_grid_arguments(p_sample, needs_labels=False, needs_preds=False)
    p_sample.add_argument("--emit-list", action="store_true", help="also write selected frame filenames")
    p_sample.set_defaults(func=cmd_sample)

    p_eval = sub.add_parser("eval", help="evaluate detector predictions")
    _add_grid_arguments(p_eval, needs_labels=True, needs_preds=True)
    p_eval.set_defaults(func=cmd_eval)

    p_lip = sub.add_parser("lipschitz", help="stability quantiles per combination")
    _add_grid_arguments(p_lip, needs_labels=True, needs_preds=True)
    p_lip.add_argument("--pairs", choices=PAIR_MODES, default=None, help="frame-pair set (default all_pairs)")
    p_lip.add_argument("--class-id", type=int, default=None, help="class whose IoU curve is analyzed (default 0)")
    p_lip.add_argument("--eval-frames", choices=("heldout", "all"), default=None, help="curve over held-out or all frames (default heldout)")
    p_lip.add_argument("--dump-quotients", action="store_true", help="write raw quotient samples")
    p_lip.add_argument("--dump-curves", action="store_true", help="write per-frame IoU curves (frame_index iou)")
    p_lip.set_defaults(func=cmd_lipschitz)

    p_diff = sub.add_parser("diffplot", help="dump the motion-energy series")
    p_diff.add_argument("--frames", required=False, help="frame directory or manifest")
    p_diff.add_argument("--out", required=False, help="output file (stdout when omitted)")
    p_diff.add_argument("--fps", type=float, default=None)
    p_diff.add_argument("--config", required=False)
    p_diff.set_defaults(func=cmd_diffplot)

    p_serve = sub.add_parser("serve", help="run the box-review service")
    p_serve.add_argument("--frames", required=False, help="frame directory or manifest")
    p_serve.add_argument("--plan", required=False, help="plan file from `sample`")
    p_serve.add_argument("--preds", required=False, help="prediction file to prefill boxes")
    p_serve.add_argument("--journal", default="review_journal.jsonl")
    p_serve.add_argument("--export-dir", default="review_export")
    p_serve.add_argument("--ui", required=False, help="static UI bundle directory")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8765)
    p_serve.add_argument("--fps", type=float, default=None)
    p_serve.add_argument("--config", required=False)
    p_serve.set_defaults(func=cmd_serve)

    return parser


_LIST_KEYS = {"strategy", "fraction", "seed"}
_REQUIRED = {
    "sample": ("frames", "strategy", "fraction", "out"),
    "eval": ("frames", "labels", "preds", "strategy", "fraction", "out"),
    "lipschitz": ("frames", "labels", "preds", "strategy", "fraction", "out"),
    "diffplot": ("frames",),
    "serve": ("frames", "plan"),
}
_DEFAULTS = {
    "runs": DEFAULT_RUNS,
    "conf_min": 0.0,
    "fps": 30.0,
    "pairs": "all_pairs",
    "class_id": 0,
    "eval_frames": "heldout",
}


def _merge_config(args) -> None:
    """Config file values backfill unset flags; then defaults backfill the rest."""
    if getattr(args, "config", None):
        file_values = parse_config_file(args.config)
        for key, value in file_values.items():
            if not hasattr(args, key):
                continue  # keys for other subcommands are tolerated
            if getattr(args, key) in (None, False):
                if key in ("emit_list", "dump_quotients"):
                    setattr(args, key, value.lower() in ("1", "true", "yes"))
                elif key in ("runs", "port", "class_id"):
                    setattr(args, key, int(value))
                elif key in ("conf_min", "fps"):
                    setattr(args, key, float(value))
                else:
                    setattr(args, key, value)
    for key, default in _DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, default)
    missing = [
        key for key in _REQUIRED[args.command] if not getattr(args, key, None)
    ]
    if missing:
        raise CliError(
            f"{args.command}: missing required option(s): "
            + ", ".join(f"--{m.replace('_', '-')}" for m in missing)
        )
    if hasattr(args, "strategy") and args.command in ("sample", "eval", "lipschitz"):
        args.strategies = parse_strategies(args.strategy)
        args.fractions = parse_fractions(args.fraction)
        if args.seed:
            args.seeds = parse_seeds(args.seed)
        elif "random" in args.strategies:
            args.seeds = list(range(args.runs))
        else:
            args.seeds = []
        if "random" in args.strategies and not args.seeds:
            raise CliError("random strategy needs --seed or --runs >= 1")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _merge_config(args)
        return args.func(args)
    except FramesiftError as exc:
        # errors escaping the grid runner are setup problems (bad paths,
        # unreadable inputs), not per-combination failures
        print(f"framesift: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
