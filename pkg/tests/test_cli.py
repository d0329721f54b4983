import shutil
from pathlib import Path

import pytest

from framesift.cli import main
from framesift.sampling import import_plan
from framesift.synthetic import generate_dataset

GRID = ["--strategy", "uniform,frame_diff,random", "--fraction", "0.2,0.5", "--seed", "0,1"]

COMBO_STEMS = [
    "uniform_p0.2_s-",
    "uniform_p0.5_s-",
    "frame_diff_p0.2_s-",
    "frame_diff_p0.5_s-",
    "random_p0.2_s0",
    "random_p0.2_s1",
    "random_p0.5_s0",
    "random_p0.5_s1",
]


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("synthetic")
    ds = generate_dataset(root, n_frames=30, seed=0)
    preds_dir = root / "grid_preds"
    preds_dir.mkdir()
    for stem in COMBO_STEMS:
        shutil.copy(ds.predictions_file, preds_dir / f"{stem}.preds")
    return ds, preds_dir


def run_grid(ds, preds_dir, out: Path) -> None:
    assert main(["sample", "--frames", str(ds.frames_dir), *GRID, "--out", str(out), "--emit-list"]) == 0
    assert main([
        "eval", "--frames", str(ds.frames_dir), "--labels", str(ds.labels_dir),
        "--preds", str(preds_dir), *GRID, "--out", str(out),
    ]) == 0
    assert main([
        "lipschitz", "--frames", str(ds.frames_dir), "--labels", str(ds.labels_dir),
        "--preds", str(preds_dir), *GRID, "--out", str(out),
    ]) == 0


class TestSample:
    def test_plan_file_per_combination(self, dataset, tmp_path):
        ds, _ = dataset
        out = tmp_path / "plans"
        assert main([
            "sample", "--frames", str(ds.frames_dir),
            "--strategy", "uniform,frame_diff", "--fraction", "0.1,0.2,0.33,0.5",
            "--out", str(out),
        ]) == 0
        assert len(list(out.glob("*.plan"))) == 8

    def test_random_runs_default_five(self, dataset, tmp_path):
        ds, _ = dataset
        out = tmp_path / "plans"
        assert main([
            "sample", "--frames", str(ds.frames_dir),
            "--strategy", "random", "--fraction", "0.2", "--out", str(out),
        ]) == 0
        assert len(list(out.glob("random_p0.2_s*.plan"))) == 5

    def test_plan_files_reimport(self, dataset, tmp_path):
        ds, _ = dataset
        out = tmp_path / "plans"
        main(["sample", "--frames", str(ds.frames_dir), *GRID, "--out", str(out)])
        plan = import_plan(out / "uniform_p0.2_s-.plan")
        assert plan.strategy == "uniform"
        assert plan.total_frames == 30
        assert len(plan) == 6

    def test_diff_small_budget_cardinality(self, dataset, tmp_path):
        ds, _ = dataset
        out = tmp_path / "plans"
        main([
            "sample", "--frames", str(ds.frames_dir),
            "--strategy", "frame_diff", "--fraction", "0.1", "--out", str(out),
        ])
        plan = import_plan(out / "frame_diff_p0.1_s-.plan")
        assert len(plan) == 3  # round(0.1 * 30)

    def test_emit_list_matches_plan(self, dataset, tmp_path):
        ds, _ = dataset
        out = tmp_path / "plans"
        main(["sample", "--frames", str(ds.frames_dir), *GRID, "--out", str(out), "--emit-list"])
        plan = import_plan(out / "uniform_p0.5_s-.plan")
        names = (out / "uniform_p0.5_s-.frames").read_text().splitlines()
        assert names == [f"{i:06d}.png" for i in plan.selected]


class TestEval:
    def test_summary_shape(self, dataset, tmp_path):
        ds, preds_dir = dataset
        out = tmp_path / "out"
        run_grid(ds, preds_dir, out)
        lines = (out / "eval_summary.txt").read_text().splitlines()
        data = [l for l in lines if not l.startswith("#")]
        # header + rule + 6 (strategy, P) rows
        assert len(data) == 2 + 6
        assert data[0].split() == ["Strategy", "P", "Precision", "Recall", "mAP@0.5"]
        strategies = [row.split()[0] for row in data[2:]]
        assert strategies == ["uniform", "uniform", "frame_diff", "frame_diff", "random", "random"]
        ps = [row.split()[1] for row in data[2:]]
        assert ps == ["20", "50", "20", "50", "20", "50"]

    def test_missing_predictions_is_partial_failure(self, dataset, tmp_path):
        ds, preds_dir = dataset
        broken = tmp_path / "partial_preds"
        broken.mkdir()
        for stem in COMBO_STEMS[:4]:
            shutil.copy(preds_dir / f"{stem}.preds", broken / f"{stem}.preds")
        code = main([
            "eval", "--frames", str(ds.frames_dir), "--labels", str(ds.labels_dir),
            "--preds", str(broken), *GRID, "--out", str(tmp_path / "out"),
        ])
        assert code == 2
        # surviving combinations still produced reports
        assert (tmp_path / "out" / "uniform_p0.2_s-.eval.txt").is_file()

    def test_per_combination_reports(self, dataset, tmp_path):
        ds, preds_dir = dataset
        out = tmp_path / "out"
        run_grid(ds, preds_dir, out)
        for stem in COMBO_STEMS:
            assert (out / f"{stem}.eval.txt").is_file()
            assert (out / f"{stem}.eval.kv").is_file()
        kv = (out / "uniform_p0.2_s-.eval.kv").read_text()
        assert "map50=" in kv


class TestLipschitz:
    def test_summary_shape(self, dataset, tmp_path):
        ds, preds_dir = dataset
        out = tmp_path / "out"
        run_grid(ds, preds_dir, out)
        lines = (out / "lipschitz_summary.txt").read_text().splitlines()
        data = [l for l in lines if not l.startswith("#")]
        assert data[0].split() == ["Strategy", "P", "K_50", "K_90", "K_95", "K_99"]
        assert len(data) == 2 + 6

    def test_quantile_columns_monotone(self, dataset, tmp_path):
        ds, preds_dir = dataset
        out = tmp_path / "out"
        run_grid(ds, preds_dir, out)
        lines = (out / "lipschitz_summary.txt").read_text().splitlines()
        for row in [l for l in lines if not l.startswith(("#", "Strategy", "--"))]:
            ks = [float(v) for v in row.split()[2:]]
            assert ks == sorted(ks)

    def test_consecutive_mode_and_dumps(self, dataset, tmp_path):
        ds, preds_dir = dataset
        out = tmp_path / "out"
        assert main([
            "lipschitz", "--frames", str(ds.frames_dir), "--labels", str(ds.labels_dir),
            "--preds", str(preds_dir), "--strategy", "uniform", "--fraction", "0.5",
            "--pairs", "consecutive", "--dump-quotients", "--dump-curves",
            "--out", str(out),
        ]) == 0
        dump = (out / "uniform_p0.5_s-.quotients").read_text().splitlines()
        assert all(len(line.split()) == 5 for line in dump)
        curve = (out / "uniform_p0.5_s-.iou").read_text().splitlines()
        assert len(curve) == 15  # held-out frames of a half-budget 30-frame plan
        assert all(len(line.split()) == 2 for line in curve)


class TestDiffplot:
    def test_two_column_dump(self, dataset, tmp_path, capsys):
        ds, _ = dataset
        assert main(["diffplot", "--frames", str(ds.frames_dir)]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 29
        assert all(len(l.split()) == 2 for l in lines)
        assert lines[0].split()[0] == "1"

    def test_single_frame_is_setup_error(self, tmp_path):
        from conftest import write_png
        import numpy as np

        d = tmp_path / "one"
        d.mkdir()
        write_png(d / "0.png", np.zeros((4, 4, 3)))
        assert main(["diffplot", "--frames", str(d)]) == 1


class TestDeterminism:
    def test_grid_outputs_byte_identical(self, dataset, tmp_path):
        ds, preds_dir = dataset
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        run_grid(ds, preds_dir, out_a)
        run_grid(ds, preds_dir, out_b)
        files_a = sorted(p.relative_to(out_a) for p in out_a.rglob("*") if p.is_file())
        files_b = sorted(p.relative_to(out_b) for p in out_b.rglob("*") if p.is_file())
        assert files_a == files_b
        for rel in files_a:
            assert (out_a / rel).read_bytes() == (out_b / rel).read_bytes(), rel


class TestConfigFile:
    def test_config_supplies_flags(self, dataset, tmp_path):
        ds, _ = dataset
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(
            f"frames = {ds.frames_dir}\n"
            "strategy = uniform\n"
            "fraction = 0.5\n"
            f"out = {tmp_path / 'out'}\n"
        )
        assert main(["sample", "--config", str(cfg)]) == 0
        assert (tmp_path / "out" / "uniform_p0.5_s-.plan").is_file()

    def test_flags_override_config(self, dataset, tmp_path):
        ds, _ = dataset
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(
            f"frames = {ds.frames_dir}\nstrategy = uniform\nfraction = 0.5\n"
            f"out = {tmp_path / 'from_config'}\n"
        )
        assert main(["sample", "--config", str(cfg), "--out", str(tmp_path / "flag_wins")]) == 0
        assert (tmp_path / "flag_wins" / "uniform_p0.5_s-.plan").is_file()
        assert not (tmp_path / "from_config").exists()

    def test_missing_required_is_usage_error(self):
        assert main(["sample", "--strategy", "uniform"]) == 1

    def test_unknown_strategy_is_usage_error(self, dataset, tmp_path):
        ds, _ = dataset
        assert main([
            "sample", "--frames", str(ds.frames_dir),
            "--strategy", "sobel", "--fraction", "0.5", "--out", str(tmp_path / "o"),
        ]) == 1
