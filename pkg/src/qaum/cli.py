"""Command-line interface: ``qaum train | table | bloch | fourier``.

Exit codes: 0 success, 1 configuration/usage error, 2 data error,
3 numeric failure, 4 Fourier truncation check failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .circuits import FeatureGate
from .data import file_digest, fit_scale, load_csv, make_rng
from .exceptions import ConfigurationError, DataError, NumericError, StructuralError
from .fourier import extract_feature_spectrum, extract_spectrum, verify_truncation
from .plotting import write_bloch_svg
from .training import TrainConfig, build_circuit, train, uncertainty_protocol

log = logging.getLogger("qaum")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _load_config_file(path):
    if path is None:
        return {}
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {path} is not valid JSON: {exc}") from None


def _pick(args, file_cfg, flag, key, default):
    """Flag beats config file beats default."""
    value = getattr(args, flag, None)
    if value is not None:
        return value
    return file_cfg.get(key, default)


def _require_positive(value, flag):
    if value is None or value < 1:
        raise ConfigurationError(f"{flag} must be a positive integer, got {value}")
    return value


def _train_config(args, file_cfg) -> TrainConfig:
    seed = _pick(args, file_cfg, "seed", "seed", 0)
    cfg = TrainConfig(
        ansatz=_pick(args, file_cfg, "ansatz", "ansatz", "qaum"),
        repetitions=_require_positive(_pick(args, file_cfg, "reps", "repetitions", 2), "--reps"),
        learning_rate=float(_pick(args, file_cfg, "lr", "learning_rate", 0.1)),
        epochs=_require_positive(_pick(args, file_cfg, "epochs", "epochs", 150), "--epochs"),
        clamp_epsilon=float(_pick(args, file_cfg, "clamp_epsilon", "clamp_epsilon", 1e-7)),
        weight_seed=_pick(args, file_cfg, "weight_seed", "weight_seed", seed),
        sample_seed=_pick(args, file_cfg, "sample_seed", "sample_seed", seed),
        sample_size=_require_positive(_pick(args, file_cfg, "sample_size", "sample_size", 100), "--sample-size"),
        n_wires=_require_positive(_pick(args, file_cfg, "n_wires", "n_wires", 9), "--n-wires"),
        checkpoints=tuple(_pick(args, file_cfg, "checkpoints", "checkpoints", (1, 50, 100, 150))),
        bloch_points=_pick(args, file_cfg, "bloch_points", "bloch_points", 1000),
    )
    return cfg


def _load_scaled(path):
    if path is None:
        raise DataError("--data is required")
    raw = load_csv(path)
    log.info("loaded %d rows from %s, class counts %s", len(raw), path, raw.class_counts())
    return fit_scale(raw), file_digest(path)


def _manifest(command, config, data_path, digest, outputs):
    return {
        "tool": "qaum",
        "version": __version__,
        "command": command,
        "config": config,
        "input": None if data_path is None else {"path": str(data_path), "sha256": digest},
        "outputs": sorted(str(p) for p in outputs),
    }


def cmd_train(args) -> int:
    file_cfg = _load_config_file(args.config)
    config = _train_config(args, file_cfg)
    data_path = _pick(args, file_cfg, "data", "data", None)
    dataset, digest = _load_scaled(data_path)
    out = Path(_pick(args, file_cfg, "out", "out", "run"))
    out.mkdir(parents=True, exist_ok=True)

    report = train(config, dataset)
    outputs = [out / "report.json", out / "loss.csv"]
    _write_json(out / "report.json", report.to_dict())
    _write_csv(out / "loss.csv", ["epoch", "loss"],
               [(i + 1, repr(float(v))) for i, v in enumerate(report.loss_curve)])
    if report.bloch_trajectory:
        rows = [
            (epoch, int(r[0]), repr(float(r[1])), repr(float(r[2])), repr(float(r[3])))
            for epoch in sorted(report.bloch_trajectory)
            for r in report.bloch_trajectory[epoch]
        ]
        _write_csv(out / "trajectory.csv", ["epoch", "label", "x", "y", "z"], rows)
        outputs.append(out / "trajectory.csv")
    outputs.append(out / "manifest.json")
    _write_json(out / "manifest.json", _manifest("train", config.to_dict(), data_path, digest, outputs))
    print(f"min_loss={report.min_loss:.4f} train_acc={report.train_accuracy:.3f} "
          f"holdout_acc={report.holdout_accuracy:.3f} -> {out}")
    return EXIT_OK


TABLE_HEADER = ["Model", "Qubits", "Repetitions", "Params", "MinLoss", "InitErr", "SamplingErr",
                "TrainAcc", "HoldoutAcc"]


def format_table(rows) -> str:
    cells = [TABLE_HEADER] + [
        [r["model"], str(r["qubits"]), str(r["repetitions"]), str(r["params"]),
         f'{r["min_loss"]:.3f}', f'{r["init_err"]:.3f}', f'{r["sampling_err"]:.3f}',
         f'{r["train_accuracy"]:.3f}', f'{r["holdout_accuracy"]:.3f}']
        for r in rows
    ]
    widths = [max(len(row[i]) for row in cells) for i in range(len(TABLE_HEADER))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "-" * len(lines[0]))
    return "\n".join(lines)


def cmd_table(args) -> int:
    file_cfg = _load_config_file(args.config)
    base = _train_config(args, file_cfg)
    base = replace(base, bloch_points=0)
    reps_list = [_require_positive(r, "--reps") for r in (args.reps_list or file_cfg.get("reps_list", [1, 2, 3]))]
    ansatze = args.ansatze or file_cfg.get("ansatze", ["qaoa", "qaum"])
    n_runs = _require_positive(_pick(args, file_cfg, "runs", "runs", 5), "--runs")
    data_path = _pick(args, file_cfg, "data", "data", None)
    dataset, digest = _load_scaled(data_path)
    out = Path(_pick(args, file_cfg, "out", "out", "table"))
    out.mkdir(parents=True, exist_ok=True)

    rows = []
    for ansatz in ansatze:
        for reps in reps_list:
            cfg = replace(base, ansatz=ansatz, repetitions=reps)
            u = uncertainty_protocol(cfg, dataset, n_runs=n_runs, n_jobs=args.jobs)
            rows.append({
                "model": ansatz.upper(),
                "qubits": u.n_qubits,
                "repetitions": reps,
                "params": u.n_weights,
                "min_loss": u.mean_min_loss,
                "init_err": u.init_err,
                "sampling_err": u.sampling_err,
                "train_accuracy": u.mean_train_accuracy,
                "holdout_accuracy": u.mean_holdout_accuracy,
                "uncertainty": u.to_dict(),
            })
    print(format_table(rows))
    _write_csv(out / "table.csv", TABLE_HEADER, [
        [r["model"], r["qubits"], r["repetitions"], r["params"], repr(r["min_loss"]), repr(r["init_err"]),
         repr(r["sampling_err"]), repr(r["train_accuracy"]), repr(r["holdout_accuracy"])]
        for r in rows
    ])
    _write_json(out / "table.json", rows)
    outputs = [out / "table.csv", out / "table.json", out / "manifest.json"]
    config = dict(base.to_dict(), reps_list=reps_list, ansatze=list(ansatze), runs=n_runs)
    _write_json(out / "manifest.json", _manifest("table", config, data_path, digest, outputs))
    return EXIT_OK


def read_trajectory(path) -> dict:
    """``{epoch: (m, 4) array of label, x, y, z}`` from a ``trajectory.csv``."""
    out = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(int(row["epoch"]), []).append(
                [float(row["label"]), float(row["x"]), float(row["y"]), float(row["z"])]
            )
    return {k: np.array(v) for k, v in sorted(out.items())}


def cmd_bloch(args) -> int:
    run = Path(args.run)
    traj_path = run / "trajectory.csv"
    if not traj_path.is_file():
        raise DataError(f"{run} has no trajectory.csv; train a QAUM model with --bloch-points > 0")
    trajectory = read_trajectory(traj_path)
    if not trajectory:
        raise DataError(f"{traj_path} holds no checkpoints")
    max_points = args.max_points
    if max_points is not None and max_points < 1:
        raise ConfigurationError("--max-points must be positive")
    epochs = args.epochs or sorted(trajectory)
    missing = [e for e in epochs if e not in trajectory]
    if missing:
        raise DataError(f"checkpoints {missing} not recorded in {traj_path}")
    out = Path(args.out) if args.out else run
    out.mkdir(parents=True, exist_ok=True)
    outputs = []
    for epoch in epochs:
        records = trajectory[epoch] if max_points is None else trajectory[epoch][:max_points]
        csv_path = out / f"bloch_epoch{epoch}.csv"
        _write_csv(csv_path, ["label", "x", "y", "z"],
                   [(int(r[0]), *(repr(float(v)) for v in r[1:])) for r in records])
        svg_path = write_bloch_svg(out / f"bloch_epoch{epoch}.svg", records, title=f"epoch {epoch}")
        outputs += [csv_path, svg_path]
    print(f"wrote {len(outputs)} files to {out}")
    return EXIT_OK


def _fourier_weights(args, circuit):
    if args.weights:
        try:
            blob = json.loads(Path(args.weights).read_text())
        except FileNotFoundError:
            raise DataError(f"weights file not found: {args.weights}") from None
        except json.JSONDecodeError as exc:
            raise DataError(f"weights file {args.weights} is not valid JSON: {exc}") from None
        weights = np.asarray(blob["final_weights"] if isinstance(blob, dict) else blob, dtype=float)
        if weights.shape != (circuit.n_weights,):
            raise ConfigurationError(f"weights file has {weights.size} values, circuit needs {circuit.n_weights}")
        return weights
    if not args.random_weights:
        raise ConfigurationError("pass --weights FILE or --random-weights")
    return make_rng(args.seed or 0).uniform(0, 2 * np.pi, circuit.n_weights)


def encodings_per_feature(circuit) -> int:
    counts = {}
    for op in circuit.ops:
        if isinstance(op, FeatureGate):
            counts[op.feature_index] = counts.get(op.feature_index, 0) + 1
    return max(counts.values(), default=0)


def cmd_fourier(args) -> int:
    file_cfg = _load_config_file(args.config)
    reps = _require_positive(_pick(args, file_cfg, "reps", "repetitions", 1), "--reps")
    cfg = TrainConfig(
        ansatz=_pick(args, file_cfg, "ansatz", "ansatz", "qaum"),
        repetitions=reps,
        n_wires=_require_positive(_pick(args, file_cfg, "n_wires", "n_wires", 9), "--n-wires"),
    )
    n_features = _require_positive(_pick(args, file_cfg, "n_features", "n_features", 1), "--n-features")
    circuit = build_circuit(cfg, n_features)
    degree = encodings_per_feature(circuit)
    probe = _pick(args, file_cfg, "probe", "probe", degree + 2)
    if probe < degree:
        raise ConfigurationError(f"--probe {probe} is below the model degree {degree}")
    weights = _fourier_weights(args, circuit)
    if args.feature_index is None:
        spectrum = extract_spectrum(circuit, weights, probe)
    else:
        base = make_rng((args.seed or 0) + 1).uniform(0, np.pi, circuit.n_features)
        spectrum = extract_feature_spectrum(circuit, weights, args.feature_index, base, probe)
    verdict = verify_truncation(spectrum, degree)
    out = Path(_pick(args, file_cfg, "out", "out", "fourier"))
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "spectrum.json", spectrum.to_dict())
    _write_json(out / "verdict.json", dict(verdict.to_dict(), hermitian_defect=spectrum.hermitian_defect(),
                                             circuit=circuit.name))
    outputs = [out / "spectrum.json", out / "verdict.json", out / "manifest.json"]
    _write_json(out / "manifest.json", _manifest(
        "fourier", dict(cfg.to_dict(), n_features=n_features, probe=probe, feature_index=args.feature_index,
                        weights=args.weights, random_weights=bool(args.random_weights), seed=args.seed),
        None, None, outputs))
    status = "PASS" if verdict.passed else "FAIL"
    print(f"{status}: max leakage beyond degree {degree} = {verdict.max_leakage:.3e}")
    return EXIT_OK if verdict.passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--data", help="HTRU2 CSV (8 features + label, no header)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="seed for weights and sampling")
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("-v", "--verbose", action="store_true")

    model = _Parser(add_help=False)
    model.add_argument("--ansatz", choices=("qaum", "qaoa"))
    model.add_argument("--reps", type=int, help="encoding repetitions L")
    model.add_argument("--n-wires", dest="n_wires", type=int, help="QAOA wires (default 9)")

    training = _Parser(add_help=False)
    training.add_argument("--epochs", type=int)
    training.add_argument("--lr", type=float)
    training.add_argument("--clamp-epsilon", dest="clamp_epsilon", type=float)
    training.add_argument("--sample-size", dest="sample_size", type=int)
    training.add_argument("--weight-seed", dest="weight_seed", type=int)
    training.add_argument("--sample-seed", dest="sample_seed", type=int)

    parser = _Parser(prog="qaum", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", parents=[common, model, training], help="train one model")
    p.add_argument("--bloch-points", dest="bloch_points", type=int,
                   help="points recorded per Bloch checkpoint (QAUM only, default 1000)")
    p.add_argument("--checkpoints", type=int, nargs="+", help="epochs to record (default 1 50 100 150)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("table", parents=[common, model, training], help="QAOA vs QAUM comparison grid")
    p.add_argument("--reps-list", dest="reps_list", type=int, nargs="+", help="repetitions to run (default 1 2 3)")
    p.add_argument("--ansatze", nargs="+", choices=("qaum", "qaoa"))
    p.add_argument("--runs", type=int, help="runs per error estimate (default 5)")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("bloch", parents=[common], help="Bloch-sphere CSV/SVG from a QAUM run")
    p.add_argument("--run", required=True, help="run directory written by `train`")
    p.add_argument("--max-points", dest="max_points", type=int)
    p.add_argument("--epochs", type=int, nargs="+", help="checkpoints to export (default: all recorded)")
    p.set_defaults(func=cmd_bloch)

    p = sub.add_parser("fourier", parents=[common, model], help="spectrum and truncation check")
    p.add_argument("--n-features", dest="n_features", type=int, help="features (default 1; grid grows as (2p+1)^N)")
    p.add_argument("--probe", type=int, help="probe degree (default L + 2)")
    p.add_argument("--weights", help="JSON list of weights or a report.json")
    p.add_argument("--random-weights", dest="random_weights", action="store_true")
    p.add_argument("--feature-index", dest="feature_index", type=int,
                   help="vary only this feature, others frozen at random values")
    p.set_defaults(func=cmd_fourier)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (ConfigurationError, StructuralError) as exc:
        print(f"qaum {args.command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"qaum {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"qaum {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
