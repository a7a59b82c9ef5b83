import json

import numpy as np
import pytest

from wsol.cli import main, read_dataset_csv, write_dataset_csv


def run(argv):
    return main([str(a) for a in argv])


@pytest.fixture
def demo_dir(tmp_path):
    out = tmp_path / "demo"
    assert run(["demo-figure1", "--out-dir", out]) == 0
    return out


@pytest.fixture
def loss_file(tmp_path):
    path = tmp_path / "loss.json"
    path.write_text(
        json.dumps(
            {
                "score": "tss",
                "weights": {"variant": "value_max", "omega": [0.6, 0.3, 0.1]},
                "distribution": {"kind": "uniform"},
            }
        )
    )
    return path


@pytest.fixture
def synth_file(tmp_path):
    path = tmp_path / "synth.json"
    path.write_text(json.dumps({"n": 80, "event_rate": 0.2, "seed": 3}))
    return path


class TestDemo:
    def test_emits_expected_files_and_claims(self, demo_dir):
        comparison = json.loads((demo_dir / "comparison.json").read_text())
        assert comparison["confusion"] == {"tn": 15, "fp": 4, "fn": 2, "tp": 5}
        for name in ("tss", "hss", "f1"):
            adj = comparison["weighted_scores"]["adjacent_errors"][name]
            iso = comparison["weighted_scores"]["isolated_errors"][name]
            assert adj > iso
        assert (demo_dir / "series_adjacent_errors.csv").exists()
        assert (demo_dir / "series_isolated_errors.csv").exists()

    def test_deterministic(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        run(["demo-figure1", "--out-dir", a])
        run(["demo-figure1", "--out-dir", b])
        for name in (
            "comparison.json",
            "series_adjacent_errors.csv",
            "series_isolated_errors.csv",
        ):
            assert (a / name).read_bytes() == (b / name).read_bytes()


class TestEval:
    def test_demo_pair_reports(self, demo_dir, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "distribution": {"kind": "uniform"},
                    "weights": {"variant": "value_max", "omega": [0.6, 0.3, 0.1]},
                    "score": "tss",
                }
            )
        )
        reports = {}
        for tag in ("adjacent", "isolated"):
            out = tmp_path / f"report_{tag}.json"
            code = run(
                [
                    "eval",
                    "--data",
                    demo_dir / f"series_{tag}_errors.csv",
                    "--config",
                    cfg,
                    "--out",
                    out,
                ]
            )
            assert code == 0
            reports[tag] = json.loads(out.read_text())
        adj, iso = reports["adjacent"], reports["isolated"]
        for row_a, row_b in zip(adj["sweep"], iso["sweep"]):
            assert row_a["scores"] == row_b["scores"]
        assert (
            adj["expected"]["scores_weighted"]["tss"]
            > iso["expected"]["scores_weighted"]["tss"]
        )

    def test_unit_weights_reduce_to_classical_expectation(self, demo_dir, tmp_path):
        cfg = tmp_path / "unit.json"
        cfg.write_text(
            json.dumps({"distribution": {"kind": "uniform"}, "weights": {"variant": "unit"}})
        )
        out = tmp_path / "unit_report.json"
        run(
            [
                "eval",
                "--data",
                demo_dir / "series_adjacent_errors.csv",
                "--config",
                cfg,
                "--out",
                out,
            ]
        )
        report = json.loads(out.read_text())
        assert report["expected"]["classical"] == report["expected"]["weighted"]

    def test_empty_series_is_input_error(self, tmp_path, capsys):
        data = tmp_path / "empty.csv"
        data.write_text("timestamp,label,prediction\n")
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"weights": {"variant": "unit"}}))
        assert run(["eval", "--data", data, "--config", cfg]) == 1
        assert "empty series" in capsys.readouterr().err

    def test_gated_combination_is_config_error(self, demo_dir, tmp_path, capsys):
        cfg = tmp_path / "gated.json"
        cfg.write_text(
            json.dumps(
                {
                    "distribution": {"kind": "beta", "alpha": 2.0, "beta": 2.0},
                    "weights": {
                        "variant": "cross_entropy",
                        "omega0": 1.0,
                        "omega1": 1.0,
                    },
                }
            )
        )
        code = run(
            [
                "eval",
                "--data",
                demo_dir / "series_adjacent_errors.csv",
                "--config",
                cfg,
            ]
        )
        assert code == 2
        assert "uniform prior" in capsys.readouterr().err


class TestLoss:
    def test_prints_value_and_gradient_csv(self, demo_dir, loss_file, capsys):
        code = run(
            [
                "loss",
                "--data",
                demo_dir / "series_adjacent_errors.csv",
                "--loss",
                loss_file,
                "--gradient",
            ]
        )
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("loss,")
        assert lines[1] == "index,gradient"
        rows = [line.split(",") for line in lines[2:]]
        assert len(rows) == 26
        values = np.array([float(v) for _, v in rows])
        assert np.all(np.isfinite(values))
        # Cross-check against the library.
        from wsol.config import load_loss
        from wsol.loss import loss_gradient, loss_value
        from wsol.series import read_series_csv

        series = read_series_csv(demo_dir / "series_adjacent_errors.csv")
        spec = load_loss(loss_file)
        assert float(lines[0].split(",")[1]) == loss_value(series, spec)
        np.testing.assert_array_equal(values, loss_gradient(series, spec).values)

    def test_combined_loss_file(self, demo_dir, tmp_path, capsys):
        component = {
            "score": "tss",
            "weights": {"variant": "unit"},
            "distribution": {"kind": "uniform"},
        }
        path = tmp_path / "combo.json"
        path.write_text(
            json.dumps(
                {"components": [dict(component, beta=0.4), dict(component, beta=0.6)]}
            )
        )
        code = run(
            [
                "loss",
                "--data",
                demo_dir / "series_isolated_errors.csv",
                "--loss",
                path,
            ]
        )
        assert code == 0
        assert capsys.readouterr().out.startswith("loss,")


class TestVerify:
    def test_quick_pass(self, tmp_path):
        out = tmp_path / "verify.json"
        code = run(["verify", "--seed", 5, "--samples", 2000, "--out", out])
        assert code == 0
        table = json.loads(out.read_text())
        assert all(row["passed"] for row in table)

    def test_only_filter(self, capsys):
        assert run(["verify", "--only", "thm3", "--samples", 2000]) == 0
        lines = [l for l in capsys.readouterr().out.splitlines() if l.strip()]
        assert len(lines) == 1 and "thm3" in lines[0]

    def test_unmatched_filter_fails(self):
        assert run(["verify", "--only", "nonexistent_check"]) == 3

    def test_small_sample_count_widens_bands(self):
        # Bands scale with the Monte Carlo standard error, so the floor
        # sample count still passes.
        assert run(["verify", "--only", "closed_vs_mc", "--samples", 1000]) == 0


class TestTrain:
    def test_writes_artifacts_and_is_deterministic(self, tmp_path, loss_file, synth_file):
        out_a = tmp_path / "run_a"
        out_b = tmp_path / "run_b"
        argv = [
            "train",
            "--synth",
            synth_file,
            "--loss",
            loss_file,
            "--epochs",
            20,
            "--lr",
            "0.2",
            "--seed",
            7,
        ]
        assert run(argv + ["--out-dir", out_a]) == 0
        assert run(argv + ["--out-dir", out_b]) == 0
        for name in ("checkpoint.json", "history.csv", "evaluation.json"):
            assert (out_a / name).exists()
        assert (out_a / "history.csv").read_bytes() == (out_b / "history.csv").read_bytes()

    def test_missing_data_and_synth_is_input_error(self, loss_file, capsys):
        assert run(["train", "--loss", loss_file]) == 1
        assert "needs --data or --synth" in capsys.readouterr().err

    def test_divergence_exit_code(self, tmp_path, loss_file, capsys):
        # A non-finite feature poisons the forward pass at epoch 0.
        data = tmp_path / "poisoned.csv"
        data.write_text(
            "f1,f2,label\n0.5,1.0,1\nnan,0.2,0\n0.1,0.3,1\n0.2,0.1,0\n"
        )
        code = run(
            [
                "train",
                "--data",
                data,
                "--loss",
                loss_file,
                "--epochs",
                10,
                "--out-dir",
                tmp_path / "diverge",
            ]
        )
        assert code == 4
        assert "epoch 0" in capsys.readouterr().err

    def test_trains_from_dataset_csv(self, tmp_path, loss_file):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(40, 3))
        y = (rng.random(40) < 0.4).astype(int)
        y[:2] = [0, 1]
        data = tmp_path / "data.csv"
        write_dataset_csv(data, x, y)
        back_x, back_y = read_dataset_csv(data)
        np.testing.assert_allclose(back_x, x)
        np.testing.assert_array_equal(back_y, y)
        code = run(
            [
                "train",
                "--data",
                data,
                "--loss",
                loss_file,
                "--epochs",
                5,
                "--out-dir",
                tmp_path / "from_csv",
            ]
        )
        assert code == 0


def test_seed_env_override(tmp_path, monkeypatch, loss_file, synth_file):
    monkeypatch.setenv("WSOL_SEED", "123")
    out_a = tmp_path / "env_a"
    out_b = tmp_path / "env_b"
    argv = ["train", "--synth", synth_file, "--loss", loss_file, "--epochs", 3]
    assert run(argv + ["--out-dir", out_a]) == 0
    monkeypatch.setenv("WSOL_SEED", "124")
    assert run(argv + ["--out-dir", out_b]) == 0
    assert (out_a / "history.csv").read_bytes() != (out_b / "history.csv").read_bytes()
