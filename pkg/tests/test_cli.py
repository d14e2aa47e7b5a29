import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from qaum.cli import main, read_trajectory
from qaum.data import file_digest


def run(*argv):
    return main([str(a) for a in argv])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.fixture(scope="module")
def run_dir(synthetic_csv, tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    code = run("train", "--ansatz", "qaum", "--reps", 1, "--data", synthetic_csv, "--seed", 7,
               "--out", out, "--epochs", 8, "--sample-size", 40, "--checkpoints", 1, 4, 8,
               "--bloch-points", 60)
    assert code == 0
    return out


def test_train_outputs(run_dir, synthetic_csv):
    report = json.loads((run_dir / "report.json").read_text())
    assert len(report["loss_curve"]) == 8
    assert report["config"]["weight_seed"] == 7 and report["config"]["sample_seed"] == 7
    assert report["min_loss"] == min(report["loss_curve"])
    loss = read_csv(run_dir / "loss.csv")
    assert loss[0] == ["epoch", "loss"] and len(loss) == 9
    manifest = json.loads((run_dir / "manifest.json").read_text())
    assert manifest["input"]["sha256"] == file_digest(synthetic_csv)
    assert manifest["config"] == report["config"]
    assert str(run_dir / "report.json") in manifest["outputs"]


def test_train_default_epochs(synthetic_csv, tmp_path):
    assert run("train", "--reps", 1, "--data", synthetic_csv, "--out", tmp_path, "--sample-size", 10,
               "--bloch-points", 0) == 0
    assert len(json.loads((tmp_path / "report.json").read_text())["loss_curve"]) == 150
    assert not (tmp_path / "trajectory.csv").exists()


def test_train_is_deterministic(synthetic_csv, tmp_path):
    args = ["train", "--reps", 1, "--data", synthetic_csv, "--seed", 3, "--epochs", 5, "--sample-size", 20,
            "--bloch-points", 10, "--checkpoints", 5]
    assert run(*args, "--out", tmp_path / "a") == 0
    assert run(*args, "--out", tmp_path / "b") == 0
    a = json.loads((tmp_path / "a" / "report.json").read_text())
    b = json.loads((tmp_path / "b" / "report.json").read_text())
    a.pop("wall_time"), b.pop("wall_time")
    assert a == b
    for name in ("loss.csv", "trajectory.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_config_file_precedence(synthetic_csv, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"repetitions": 2, "epochs": 3, "sample_size": 20, "data": str(synthetic_csv),
                               "bloch_points": 0}))
    assert run("train", "--config", cfg, "--epochs", 2, "--out", tmp_path / "o") == 0
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["config"]["repetitions"] == 2
    assert len(report["loss_curve"]) == 2


def test_exit_codes(synthetic_csv, tmp_path, capsys):
    assert run("train", "--reps", 0, "--data", synthetic_csv, "--out", tmp_path) == 1
    assert "--reps" in capsys.readouterr().err
    assert run("train", "--reps", 1, "--data", tmp_path / "missing.csv", "--out", tmp_path) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2,3\n")
    assert run("train", "--data", bad, "--out", tmp_path) == 2
    assert run("train", "--reps", 1, "--data", synthetic_csv, "--sample-size", 4000, "--out", tmp_path) == 1
    with pytest.raises(SystemExit) as exc:
        run("train", "--ansatz", "mlp")
    assert exc.value.code == 1


def test_numeric_failure_exit_code(synthetic_csv, tmp_path, monkeypatch):
    import qaum.training

    def broken(*args, **kwargs):
        loss, grad, p1 = real(*args, **kwargs)
        return loss, grad * np.nan, p1

    real = qaum.training.loss_and_grad
    monkeypatch.setattr(qaum.training, "loss_and_grad", broken)
    assert run("train", "--reps", 1, "--data", synthetic_csv, "--epochs", 2, "--sample-size", 10,
               "--out", tmp_path) == 3


def test_bloch_export(run_dir, tmp_path):
    assert run("bloch", "--run", run_dir, "--out", tmp_path) == 0
    assert sorted(p.name for p in tmp_path.glob("bloch_epoch*.csv")) == [
        "bloch_epoch1.csv", "bloch_epoch4.csv", "bloch_epoch8.csv"]
    assert len(list(tmp_path.glob("bloch_epoch*.svg"))) == 3
    rows = read_csv(tmp_path / "bloch_epoch8.csv")
    assert rows[0] == ["label", "x", "y", "z"] and len(rows) == 61
    v = np.array([[float(c) for c in r[1:]] for r in rows[1:]])
    np.testing.assert_allclose(np.linalg.norm(v, axis=1), 1.0, atol=1e-6)
    svg = (tmp_path / "bloch_epoch1.svg").read_text()
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert 'fill="#d62728"' in svg


def test_bloch_max_points(run_dir, tmp_path):
    assert run("bloch", "--run", run_dir, "--out", tmp_path, "--max-points", 25, "--epochs", 4) == 0
    assert len(read_csv(tmp_path / "bloch_epoch4.csv")) == 26
    assert not (tmp_path / "bloch_epoch1.csv").exists()


def test_bloch_missing_trajectory(tmp_path):
    assert run("bloch", "--run", tmp_path) == 2


def test_trajectory_roundtrip(run_dir):
    traj = read_trajectory(run_dir / "trajectory.csv")
    assert sorted(traj) == [1, 4, 8]
    assert traj[1].shape == (60, 4)


def test_fourier_pass(tmp_path):
    assert run("fourier", "--ansatz", "qaum", "--reps", 1, "--random-weights", "--seed", 2, "--out", tmp_path) == 0
    spectrum = json.loads((tmp_path / "spectrum.json").read_text())
    gammas = [e["gamma"][0] for e in spectrum["coefficients"]]
    assert spectrum["max_degree"] == 3
    assert all(-3 <= g <= 3 for g in gammas)
    verdict = json.loads((tmp_path / "verdict.json").read_text())
    assert verdict["pass"] is True and verdict["max_leakage"] < 1e-9


def test_fourier_from_weights_file(run_dir, tmp_path):
    # the run used 8 features and reps 1
    code = run("fourier", "--reps", 1, "--n-features", 8, "--weights", run_dir / "report.json",
               "--feature-index", 3, "--out", tmp_path)
    assert code == 0


def test_fourier_failure_exit(tmp_path, monkeypatch):
    import qaum.cli

    monkeypatch.setattr(qaum.cli, "encodings_per_feature", lambda c: 1)
    # a reps-2 model really has degree 2, so checking it against degree 1 must fail
    assert run("fourier", "--reps", 2, "--probe", 3, "--random-weights", "--out", tmp_path) == 4


def test_fourier_guards(tmp_path):
    assert run("fourier", "--reps", 3, "--probe", 2, "--random-weights", "--out", tmp_path) == 1
    assert run("fourier", "--reps", 1, "--n-features", 8, "--random-weights", "--out", tmp_path) == 1
    assert run("fourier", "--reps", 1, "--out", tmp_path) == 1


def test_table(synthetic_csv, tmp_path, capsys):
    code = run("table", "--data", synthetic_csv, "--out", tmp_path, "--reps-list", 1, 2, "--epochs", 2,
               "--sample-size", 10, "--runs", 2, "--n-wires", 9)
    assert code == 0
    printed = capsys.readouterr().out
    assert printed.splitlines()[0].split() == ["Model", "Qubits", "Repetitions", "Params", "MinLoss",
                                               "InitErr", "SamplingErr", "TrainAcc", "HoldoutAcc"]
    rows = read_csv(tmp_path / "table.csv")
    assert [(r[0], r[1], r[3]) for r in rows[1:]] == [
        ("QAOA", "9", "18"), ("QAOA", "9", "36"), ("QAUM", "1", "27"), ("QAUM", "1", "51")]
    assert json.loads((tmp_path / "manifest.json").read_text())["config"]["runs"] == 2


def test_module_entry_point(tmp_path):
    cmd = [sys.executable, "-m", "qaum", "fourier", "--reps", "2", "--random-weights", "--out", str(tmp_path)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.startswith("PASS")
