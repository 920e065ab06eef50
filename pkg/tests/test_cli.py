"""End-to-end checks of the command-line interface.

Each test drives ``cli.main`` in process and inspects the exit code,
stdout records, and the stderr banner.  Timing keys are masked before
comparing outputs.
"""

import re
from importlib import resources
from pathlib import Path

import numpy as np
import pytest

from swarmsvm import cli

CONFIGS = Path(str(resources.files("swarmsvm") / "data" / "configs"))


def run_cli(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_record(line):
    return dict(token.split("=", 1) for token in line.split())


def mask_timing(text):
    return re.sub(r"elapsed_ms=\S+", "elapsed_ms=X", text)


def write_config(path, mapping):
    path.write_text("".join(f"{k} = {v}\n" for k, v in mapping.items()))
    return str(path)


SMALL_SPHERE = {
    "objective": "sphere",
    "dimension": "3",
    "lower": "-2",
    "upper": "2",
    "n_particles": "12",
    "max_iterations": "40",
    "variant": "apso_single_step",
    "schedule": "geometric_decay",
}


class TestUsageErrors:
    def test_no_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            cli.main([])
        assert exc.value.code == 2

    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["frobnicate"])
        assert exc.value.code == 2

    def test_bad_format_choice_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["optimize", "--config", "x.conf", "--format", "yaml"])
        assert exc.value.code == 2


class TestErrorReporting:
    def test_missing_config_flag_is_config_error(self, capsys):
        code, out, err = run_cli(["optimize"], capsys)
        assert code == 3
        assert out == ""
        lines = [l for l in err.splitlines() if l.startswith("error ")]
        assert len(lines) == 1
        assert re.fullmatch(r'error category=config message=".*"', lines[0])

    def test_nonexistent_config_file_is_data_error(self, capsys, tmp_path):
        code, _, err = run_cli(
            ["optimize", "--config", str(tmp_path / "nope.conf")], capsys)
        assert code == 4
        assert "error category=data" in err

    def test_missing_required_key_exits_3(self, capsys, tmp_path):
        cfg = write_config(tmp_path / "empty.conf", {"dimension": "3"})
        code, _, err = run_cli(["optimize", "--config", cfg], capsys)
        assert code == 3
        assert "error category=config" in err

    def test_missing_train_file_exits_4(self, capsys, tmp_path):
        cfg = write_config(tmp_path / "t.conf", {
            "train_path": "absent.txt",
            "model_path": "m.model",
        })
        code, _, err = run_cli(["svm-train", "--config", cfg], capsys)
        assert code == 4
        assert "error category=data" in err

    def test_unconverged_training_exits_5(self, capsys, tmp_path):
        rng = np.random.default_rng(3)
        pts = rng.normal(size=(40, 2))
        labels = rng.choice([-1.0, 1.0], size=40)
        rows = "".join(
            f"{labels[i]:.0f} {pts[i, 0]:.6f} {pts[i, 1]:.6f}\n" for i in range(40))
        (tmp_path / "blob.txt").write_text(rows)
        cfg = write_config(tmp_path / "hard.conf", {
            "train_path": "blob.txt",
            "kernel": "rbf",
            "gamma_kernel": "0.5",
            "C": "100",
            "tol": "1e-12",
            "max_passes": "1",
            "model_path": str(tmp_path / "never.model"),
        })
        code, out, err = run_cli(["svm-train", "--config", cfg], capsys)
        assert code == 5
        assert out == ""
        assert "error category=convergence" in err


class TestStderrProtocol:
    def test_banner_names_subcommand_config_and_seed(self, capsys, tmp_path):
        cfg = write_config(tmp_path / "s.conf", SMALL_SPHERE)
        _, _, err = run_cli(["optimize", "--config", cfg], capsys)
        first = err.splitlines()[0]
        assert first == f"# swarmsvm optimize config={cfg} seed=0"

    def test_elapsed_goes_to_stderr_not_stdout(self, capsys, tmp_path):
        cfg = write_config(tmp_path / "s.conf", SMALL_SPHERE)
        code, out, err = run_cli(["optimize", "--config", cfg], capsys)
        assert code == 0
        assert any(l.startswith("# elapsed_ms=") for l in err.splitlines())
        # stdout carries records only, no comment lines
        assert all(not l.startswith("#") for l in out.splitlines())

    def test_seed_flag_beats_config_seed(self, capsys, tmp_path):
        cfg = write_config(tmp_path / "s.conf", dict(SMALL_SPHERE, seed="4"))
        _, out, err = run_cli(["optimize", "--config", cfg, "--seed", "7"], capsys)
        assert "seed=7" in err.splitlines()[0]
        assert parse_record(out.splitlines()[0])["seed"] == "7"

    def test_unused_keys_are_warned(self, capsys, tmp_path):
        cfg = write_config(tmp_path / "s.conf", dict(SMALL_SPHERE, junk="1"))
        code, _, err = run_cli(["optimize", "--config", cfg], capsys)
        assert code == 0
        assert any("unused config keys: junk" in l for l in err.splitlines())


class TestOptimize:
    def test_same_seed_is_bit_identical_after_masking_time(self, capsys, tmp_path):
        cfg = write_config(tmp_path / "s.conf", SMALL_SPHERE)
        _, out1, _ = run_cli(["optimize", "--config", cfg, "--seed", "1"], capsys)
        _, out2, _ = run_cli(["optimize", "--config", cfg, "--seed", "1"], capsys)
        assert mask_timing(out1) == mask_timing(out2)

    def test_different_seed_changes_result(self, capsys, tmp_path):
        cfg = write_config(tmp_path / "s.conf", SMALL_SPHERE)
        _, out1, _ = run_cli(["optimize", "--config", cfg, "--seed", "1"], capsys)
        _, out2, _ = run_cli(["optimize", "--config", cfg, "--seed", "2"], capsys)
        a = parse_record(out1.splitlines()[0])
        b = parse_record(out2.splitlines()[0])
        assert a["best_position"] != b["best_position"]

    def test_bundled_sphere_config_converges(self, capsys):
        code, out, _ = run_cli(
            ["optimize", "--config", str(CONFIGS / "sphere.conf")], capsys)
        assert code == 0
        rec = parse_record(out.splitlines()[0])
        assert float(rec["best_fitness"]) < 1e-2
        assert rec["evaluations"] == str(40 * 201)

    def test_out_flag_redirects_stdout(self, capsys, tmp_path):
        cfg = write_config(tmp_path / "s.conf", SMALL_SPHERE)
        dest = tmp_path / "result.txt"
        code, out, _ = run_cli(
            ["optimize", "--config", cfg, "--out", str(dest)], capsys)
        assert code == 0
        assert out == ""
        assert "best_fitness=" in dest.read_text()


class TestSvmRoundTrip:
    def test_train_then_predict_two_points(self, capsys, tmp_path, monkeypatch):
        # model_path is taken as written, so anchor the run in tmp_path
        monkeypatch.chdir(tmp_path)
        code, out, _ = run_cli(
            ["svm-train", "--config", str(CONFIGS / "svm_2point_train.conf")],
            capsys)
        assert code == 0
        rec = parse_record(out.splitlines()[0])
        assert rec["model_path"] == "two_point.model"
        assert rec["n_support"] == "2"
        assert (tmp_path / "two_point.model").is_file()

        (tmp_path / "query.txt").write_text("2\n-2\n")
        cfg = write_config(tmp_path / "p.conf", {
            "model_path": "two_point.model",
            "data_path": "query.txt",
        })
        code, out, _ = run_cli(["svm-predict", "--config", cfg], capsys)
        assert code == 0
        recs = [parse_record(l) for l in out.splitlines()]
        assert [r["prediction"] for r in recs] == ["1", "-1"]

    def test_table_format_aligns_columns(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        run_cli(["svm-train", "--config", str(CONFIGS / "svm_2point_train.conf")],
                capsys)
        (tmp_path / "query.txt").write_text("2\n-2\n")
        cfg = write_config(tmp_path / "p.conf", {
            "model_path": "two_point.model",
            "data_path": "query.txt",
        })
        code, out, _ = run_cli(
            ["svm-predict", "--config", cfg, "--format", "table"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0].split() == ["index", "prediction"]
        assert len(lines) == 3
        # the header fixes each column's start offset
        assert lines[1].index("1") == lines[0].index("prediction")


class TestTune:
    def test_bundled_clusters_reach_zero_cv_error(self, capsys, tmp_path):
        trace = tmp_path / "trace.txt"
        cfg_text = (CONFIGS / "tune_2cluster.conf").read_text()
        cfg = tmp_path / "tune.conf"
        cfg.write_text(cfg_text.replace(
            "train_path = two_cluster_train.txt",
            f"train_path = {CONFIGS / 'two_cluster_train.txt'}")
            + f"trace_path = {trace}\n")
        code, out, _ = run_cli(["tune", "--config", str(cfg)], capsys)
        assert code == 0
        rec = parse_record(out.splitlines()[0])
        assert float(rec["cv_error"]) == 0.0
        assert int(rec["evaluations"]) == 4 * 4
        assert len(trace.read_text().splitlines()) >= 2


class TestBenchmarkCommands:
    def test_cobb_paper_instance_hits_closed_form(self, capsys):
        code, out, _ = run_cli(
            ["cobb", "--config", str(CONFIGS / "cobb_paper.conf")], capsys)
        assert code == 0
        rec = parse_record(out.splitlines()[0])
        assert float(rec["deviation"]) <= 0.01
        u = [float(t) for t in rec["best_position"].split(",")]
        assert u == pytest.approx([40.0, 50.0], rel=0.01)

    def test_adult_subsample_run(self, capsys, tmp_path):
        cfg = write_config(tmp_path / "a.conf", {
            "train_size": "64",
            "test_size": "64",
            "C": "1.25",
        })
        code, out, _ = run_cli(["adult", "--config", cfg], capsys)
        assert code == 0
        rec = parse_record(out.splitlines()[0])
        assert 0.0 <= float(rec["error_pct"]) <= 100.0
        assert "best_fitness" not in rec

    def test_rcpsp_bundled_instance(self, capsys):
        code, out, _ = run_cli(
            ["rcpsp", "--config", str(CONFIGS / "rcpsp_gen1.conf")], capsys)
        assert code == 0
        rec = parse_record(out.splitlines()[0])
        assert rec["instance"] == "gen30_1"
        assert float(rec["makespan"]) >= int(rec["critical_path_bound"])
        assert float(rec["deviation"]) >= 0.0

    def test_rcpsp_missing_best_known_entry_exits_4(self, capsys, tmp_path):
        side = tmp_path / "bk.txt"
        side.write_text("other 12\n")
        cfg = write_config(tmp_path / "r.conf", {
            "instance": str(CONFIGS.parent / "rcpsp" / "chain3.sm"),
            "best_known_path": str(side),
            "schedule_budget": "60",
            "n_particles": "6",
        })
        code, _, err = run_cli(["rcpsp", "--config", cfg], capsys)
        assert code == 4
        assert "error category=data" in err
