"""Training loop, Adam, accuracy and the two-way uncertainty protocol."""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .circuits import ParamCircuit, bloch_batch, build_qaoa_embedding, build_qaum, evaluate_batch
from .data import LabeledDataset, SampleSpec, balanced_sample, make_rng
from .exceptions import ConfigurationError, NumericError, StructuralError
from .gradient import loss_and_grad
from .loss import cross_entropy

__all__ = [
    "AdamState",
    "TrainConfig",
    "TrainReport",
    "UncertaintyReport",
    "accuracy",
    "adam_step",
    "bloch_checkpoint",
    "build_circuit",
    "cross_entropy",
    "optimize",
    "train",
    "uncertainty_protocol",
]

log = logging.getLogger(__name__)

ANSATZE = ("qaum", "qaoa")
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass(frozen=True)
class TrainConfig:
    ansatz: str = "qaum"
    repetitions: int = 2
    learning_rate: float = 0.1
    epochs: int = 150
    clamp_epsilon: float = 1e-7
    weight_seed: int = 0
    sample_seed: int = 0
    sample_size: int = 100
    n_wires: int = 9
    readout_wire: int = 0
    gradient_method: str = "auto"
    checkpoints: tuple = (1, 50, 100, 150)
    bloch_points: int = 0

    def __post_init__(self):
        object.__setattr__(self, "checkpoints", tuple(int(c) for c in self.checkpoints))
        self.validate()

    def validate(self):
        if self.ansatz not in ANSATZE:
            raise ConfigurationError(f"ansatz must be one of {ANSATZE}, got {self.ansatz!r}")
        for name in ("repetitions", "epochs", "sample_size", "n_wires"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise ConfigurationError(f"{name} must be a positive integer, got {value!r}")
        if not self.learning_rate > 0:
            raise ConfigurationError(f"learning_rate must be > 0, got {self.learning_rate!r}")
        if not 0 < self.clamp_epsilon < 0.5:
            raise ConfigurationError(f"clamp_epsilon must lie in (0, 0.5), got {self.clamp_epsilon!r}")
        if self.gradient_method not in ("auto", "shift", "adjoint"):
            raise ConfigurationError(f"unknown gradient_method {self.gradient_method!r}")
        for name in ("weight_seed", "sample_seed"):
            if not 0 <= getattr(self, name) < 2**64:
                raise ConfigurationError(f"{name} must be a non-negative 64-bit integer")
        if self.bloch_points < 0:
            raise ConfigurationError("bloch_points must be >= 0")
        SampleSpec(self.sample_size, self.sample_seed)

    def to_dict(self):
        d = asdict(self)
        d["checkpoints"] = list(self.checkpoints)
        return d

    @classmethod
    def from_dict(cls, d):
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        return cls(**known)


@dataclass
class TrainReport:
    loss_curve: np.ndarray
    min_loss: float
    train_accuracy: float
    holdout_accuracy: float
    final_weights: np.ndarray
    wall_time: float
    config: TrainConfig | None = None
    circuit_name: str = ""
    n_qubits: int = 1
    bloch_trajectory: dict | None = None

    def to_dict(self) -> dict:
        out = {
            "config": None if self.config is None else self.config.to_dict(),
            "circuit": self.circuit_name,
            "n_qubits": self.n_qubits,
            "n_weights": int(len(self.final_weights)),
            "loss_curve": [float(v) for v in self.loss_curve],
            "min_loss": float(self.min_loss),
            "train_accuracy": float(self.train_accuracy),
            "holdout_accuracy": float(self.holdout_accuracy),
            "final_weights": [float(v) for v in self.final_weights],
            "wall_time": float(self.wall_time),
        }
        if self.bloch_trajectory is not None:
            out["bloch_checkpoints"] = sorted(self.bloch_trajectory)
        return out


@dataclass
class UncertaintyReport:
    mean_min_loss: float
    init_err: float
    sampling_err: float
    init_min_losses: list = field(default_factory=list)
    sampling_min_losses: list = field(default_factory=list)
    mean_train_accuracy: float = float("nan")
    mean_holdout_accuracy: float = float("nan")
    n_weights: int = 0
    n_qubits: int = 0
    runs: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k != "runs"}
        d["runs"] = [
            {k: r[k] for k in ("weight_seed", "sample_seed", "min_loss", "train_accuracy", "holdout_accuracy")}
            for r in self.runs
        ]
        return d


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros(n), np.zeros(n))


def adam_step(weights, grads, state: AdamState, step_index: int, learning_rate: float):
    """One bias-corrected Adam update; returns ``(new_weights, new_state)``."""
    grads = np.asarray(grads, dtype=float)
    if step_index < 1:
        raise ConfigurationError(f"step_index starts at 1, got {step_index}")
    if not np.all(np.isfinite(grads)):
        bad = np.flatnonzero(~np.isfinite(grads)).tolist()
        raise NumericError(f"non-finite gradient at step {step_index}, weight indices {bad}")
    m = ADAM_BETA1 * state.m + (1 - ADAM_BETA1) * grads
    v = ADAM_BETA2 * state.v + (1 - ADAM_BETA2) * grads**2
    m_hat = m / (1 - ADAM_BETA1**step_index)
    v_hat = v / (1 - ADAM_BETA2**step_index)
    new = np.asarray(weights, dtype=float) - learning_rate * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
    return new, AdamState(m, v)


def build_circuit(config: TrainConfig, n_features: int) -> ParamCircuit:
    if config.ansatz == "qaum":
        return build_qaum(n_features, config.repetitions)
    return build_qaoa_embedding(config.n_wires, n_features, config.repetitions)


def resolve_method(method: str, circuit: ParamCircuit) -> str:
    if method == "auto":
        return "shift" if circuit.n_qubits == 1 else "adjoint"
    return method


def init_weights(n_weights: int, seed: int) -> np.ndarray:
    return make_rng(seed).uniform(0.0, 2 * np.pi, n_weights)


def accuracy(circuit, weights, features, labels, readout_wire=0) -> float:
    labels = np.asarray(labels)
    if labels.size == 0:
        return float("nan")
    pred = evaluate_batch(circuit, weights, features, readout_wire) > 0.5
    return float(np.mean(pred == labels.astype(bool)))


def optimize(
    circuit: ParamCircuit,
    features,
    labels,
    weights,
    *,
    learning_rate=0.1,
    epochs=150,
    clamp_epsilon=1e-7,
    readout_wire=0,
    method="auto",
    callback=None,
):
    """Full-batch Adam on the mean clamped cross-entropy.

    The loss recorded for an epoch is the one evaluated before that
    epoch's update.  ``callback(epoch, weights)`` sees the weights after the
    update of ``epoch`` (1-based).  Returns ``(final_weights, loss_curve)``.
    """
    method = resolve_method(method, circuit)
    w = np.array(weights, dtype=float)
    state = AdamState.zeros(w.size)
    curve = np.empty(epochs)
    for epoch in range(1, epochs + 1):
        loss, grad, _ = loss_and_grad(circuit, w, features, labels, clamp_epsilon, readout_wire, method)
        if not np.isfinite(loss):
            raise NumericError(f"non-finite loss at epoch {epoch}")
        curve[epoch - 1] = loss
        w, state = adam_step(w, grad, state, epoch, learning_rate)
        if callback is not None:
            callback(epoch, w)
    return w, curve


def bloch_checkpoint(circuit: ParamCircuit, weights, dataset: LabeledDataset, max_points: int) -> np.ndarray:
    """Rows ``(label, x, y, z)`` of the final single-qubit states, at most ``max_points``."""
    if circuit.n_qubits != 1:
        raise StructuralError("Bloch checkpoints need the single-qubit QAUM ansatz")
    m = min(int(max_points), len(dataset))
    xyz = bloch_batch(circuit, weights, dataset.features[:m]) if m else np.empty((0, 3))
    return np.column_stack([dataset.labels[:m].astype(float), xyz])


def _bloch_subset(dataset, config):
    n = min(config.bloch_points, len(dataset))
    rng = make_rng(config.sample_seed)
    return dataset.subset(np.sort(rng.choice(len(dataset), size=n, replace=False)))


def train(config: TrainConfig, dataset: LabeledDataset) -> TrainReport:
    """One run: balanced sample from ``dataset``, train, score train and holdout.

    ``dataset`` must already be scaled to ``[0, pi]``.
    """
    config.validate()
    if dataset.scaling is None:
        log.warning("training on a dataset without recorded scaling bounds")
    start = time.perf_counter()
    train_set, holdout = balanced_sample(dataset, SampleSpec(config.sample_size, config.sample_seed))
    circuit = build_circuit(config, dataset.n_features)
    w0 = init_weights(circuit.n_weights, config.weight_seed)

    trajectory = None
    callback = None
    if config.bloch_points and config.ansatz == "qaum":
        bloch_set = _bloch_subset(dataset, config)
        wanted = {c for c in config.checkpoints if 0 <= c <= config.epochs}
        trajectory = {}
        if 0 in wanted:
            trajectory[0] = bloch_checkpoint(circuit, w0, bloch_set, config.bloch_points)

        def callback(epoch, w):
            if epoch in wanted:
                trajectory[epoch] = bloch_checkpoint(circuit, w, bloch_set, config.bloch_points)

    weights, curve = optimize(
        circuit,
        train_set.features,
        train_set.labels,
        w0,
        learning_rate=config.learning_rate,
        epochs=config.epochs,
        clamp_epsilon=config.clamp_epsilon,
        readout_wire=config.readout_wire,
        method=config.gradient_method,
        callback=callback,
    )
    report = TrainReport(
        loss_curve=curve,
        min_loss=float(curve.min()),
        train_accuracy=accuracy(circuit, weights, train_set.features, train_set.labels, config.readout_wire),
        holdout_accuracy=accuracy(circuit, weights, holdout.features, holdout.labels, config.readout_wire),
        final_weights=weights,
        wall_time=time.perf_counter() - start,
        config=config,
        circuit_name=circuit.name,
        n_qubits=circuit.n_qubits,
        bloch_trajectory=trajectory,
    )
    log.info(
        "%s w=%d s=%d min_loss=%.4f train_acc=%.3f holdout_acc=%.3f (%.1fs)",
        circuit.name, config.weight_seed, config.sample_seed, report.min_loss,
        report.train_accuracy, report.holdout_accuracy, report.wall_time,
    )
    return report


def _run_summary(config, dataset):
    r = train(config, dataset)
    return {
        "weight_seed": config.weight_seed,
        "sample_seed": config.sample_seed,
        "min_loss": r.min_loss,
        "train_accuracy": r.train_accuracy,
        "holdout_accuracy": r.holdout_accuracy,
        "n_weights": int(len(r.final_weights)),
        "n_qubits": r.n_qubits,
        "report": r,
    }


def _std(values):
    values = np.asarray(values, dtype=float)
    return float(np.std(values, ddof=1)) if values.size > 1 else 0.0


def uncertainty_protocol(
    config: TrainConfig,
    dataset: LabeledDataset,
    n_runs: int = 5,
    weight_seeds=None,
    sample_seeds=None,
    n_jobs: int = 1,
) -> UncertaintyReport:
    """Initialisation error and sampling error of the minimum training loss.

    Initialisation runs vary the weight seed on the sample of
    ``config.sample_seed``; sampling runs vary the sample seed with
    ``config.weight_seed``.  Errors are sample standard deviations
    (``ddof=1``); the mean loss and accuracies are over the sampling runs.
    """
    if n_runs < 1:
        raise ConfigurationError("n_runs must be >= 1")
    if weight_seeds is None:
        weight_seeds = [config.weight_seed + i for i in range(n_runs)]
    if sample_seeds is None:
        sample_seeds = [config.sample_seed + i for i in range(n_runs)]
    if len(weight_seeds) != n_runs or len(sample_seeds) != n_runs:
        raise ConfigurationError(f"need exactly {n_runs} weight seeds and sample seeds")
    init_cfgs = [replace(config, weight_seed=int(s)) for s in weight_seeds]
    samp_cfgs = [replace(config, sample_seed=int(s)) for s in sample_seeds]

    unique = {}
    for c in init_cfgs + samp_cfgs:
        unique.setdefault((c.weight_seed, c.sample_seed), c)
    keys = list(unique)
    if n_jobs == 1:
        results = [_run_summary(unique[k], dataset) for k in keys]
    else:
        from joblib import Parallel, delayed

        results = Parallel(n_jobs=n_jobs)(delayed(_run_summary)(unique[k], dataset) for k in keys)
    by_key = dict(zip(keys, results))

    init_runs = [by_key[(c.weight_seed, c.sample_seed)] for c in init_cfgs]
    samp_runs = [by_key[(c.weight_seed, c.sample_seed)] for c in samp_cfgs]
    init_losses = [r["min_loss"] for r in init_runs]
    samp_losses = [r["min_loss"] for r in samp_runs]
    return UncertaintyReport(
        mean_min_loss=float(np.mean(samp_losses)),
        init_err=_std(init_losses),
        sampling_err=_std(samp_losses),
        init_min_losses=init_losses,
        sampling_min_losses=samp_losses,
        mean_train_accuracy=float(np.mean([r["train_accuracy"] for r in samp_runs])),
        mean_holdout_accuracy=float(np.mean([r["holdout_accuracy"] for r in samp_runs])),
        n_weights=results[0]["n_weights"],
        n_qubits=results[0]["n_qubits"],
        runs=[by_key[k] for k in keys],
    )
