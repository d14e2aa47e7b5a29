"""Parametrised circuits: IR, the QAUM and QAOA-embedding builders, evaluation.

A :class:`ParamCircuit` is an ordered tuple of slots.  Fixed gates carry
their own angle, weight gates read ``weights[weight_index]`` and feature
gates read ``scale * features[feature_index]``.  Circuits are immutable;
evaluation binds arrays without touching the circuit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, StructuralError
from .statevector import (
    MAX_QUBITS,
    ROTATION_KINDS,
    Gate,
    apply_1q,
    apply_zz,
    batch_bloch,
    batch_prob_one,
    gate_matrix,
    rotation_matrices,
)

# trainable layer: arbitrary SU(2) up to phase
LAYER_KINDS = ("RZ", "RX", "RY")

# rows per simulation chunk, sized so a 9-qubit chunk stays around 32 MB
_CHUNK_AMPLITUDES = 2**21


@dataclass(frozen=True)
class FixedGate:
    gate: Gate

    @property
    def kind(self):
        return self.gate.kind

    @property
    def wires(self):
        return self.gate.wires


@dataclass(frozen=True)
class WeightGate:
    kind: str
    wires: tuple
    weight_index: int


@dataclass(frozen=True)
class FeatureGate:
    kind: str
    wires: tuple
    feature_index: int
    scale: float = 1.0


@dataclass(frozen=True)
class ModelOutput:
    p1: float


@dataclass(frozen=True)
class ParamCircuit:
    n_qubits: int
    ops: tuple
    n_weights: int
    n_features: int
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ConfigurationError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        seen_w = []
        seen_f = set()
        for op in self.ops:
            for w in op.wires:
                if not 0 <= w < self.n_qubits:
                    raise StructuralError(f"wire {w} out of range in {op}")
            if isinstance(op, WeightGate):
                if op.kind not in ROTATION_KINDS:
                    raise StructuralError(f"weight slot needs a rotation gate, got {op.kind}")
                seen_w.append(op.weight_index)
            elif isinstance(op, FeatureGate):
                if op.kind not in ROTATION_KINDS:
                    raise StructuralError(f"feature slot needs a rotation gate, got {op.kind}")
                seen_f.add(op.feature_index)
            elif not isinstance(op, FixedGate):
                raise StructuralError(f"unknown slot {op!r}")
        if sorted(seen_w) != list(range(self.n_weights)):
            raise StructuralError("every weight index must appear exactly once")
        if seen_f != set(range(self.n_features)):
            raise StructuralError("every feature index must appear at least once")

    @property
    def weight_slots(self):
        return [op for op in self.ops if isinstance(op, WeightGate)]

    def to_dict(self) -> dict:
        gates = []
        for op in self.ops:
            entry = {"kind": op.kind, "wires": list(op.wires)}
            if isinstance(op, FixedGate):
                entry["slot"] = "fixed"
                if op.gate.angle is not None:
                    entry["angle"] = op.gate.angle
            elif isinstance(op, WeightGate):
                entry["slot"] = "weight"
                entry["index"] = op.weight_index
            else:
                entry["slot"] = "feature"
                entry["index"] = op.feature_index
                entry["scale"] = op.scale
            gates.append(entry)
        return {
            "name": self.name,
            "n_qubits": self.n_qubits,
            "n_weights": self.n_weights,
            "n_features": self.n_features,
            "gates": gates,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _positive_int(value, name):
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 1:
        raise ConfigurationError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def build_qaum(n_features: int, repetitions: int) -> ParamCircuit:
    """Single-qubit QAUM ansatz.

    ``H`` then, for every encoding, a trainable ``RZ RX RY`` layer followed by
    ``RZ(x_i)``; one closing trainable layer.  Layers at repetition
    boundaries are shared, giving ``3 * (n_features * repetitions + 1)``
    weights.
    """
    n_features = _positive_int(n_features, "n_features")
    repetitions = _positive_int(repetitions, "repetitions")
    ops = [FixedGate(Gate("H", (0,)))]
    k = 0

    def layer():
        nonlocal k
        for kind in LAYER_KINDS:
            ops.append(WeightGate(kind, (0,), k))
            k += 1

    for _ in range(repetitions):
        for i in range(n_features):
            layer()
            ops.append(FeatureGate("RZ", (0,), i))
    layer()
    return ParamCircuit(1, ops, k, n_features, name=f"qaum(n_features={n_features}, reps={repetitions})")


def build_qaoa_embedding(n_wires: int, n_features: int, repetitions: int) -> ParamCircuit:
    """QAOA-style feature embedding with ``RY`` local fields.

    Per repetition: ``RX(x_i)`` on wire ``i`` (``H`` on wires beyond the
    features), ring ``ZZ`` entanglers, ``RY`` on every wire.  The feature
    layer is applied once more at the end.
    """
    n_wires = _positive_int(n_wires, "n_wires")
    n_features = _positive_int(n_features, "n_features")
    repetitions = _positive_int(repetitions, "repetitions")
    if n_wires < 2:
        raise ConfigurationError("QAOA embedding needs at least 2 wires")
    if n_features > n_wires:
        raise ConfigurationError(f"{n_features} features do not fit on {n_wires} wires")
    ops = []
    k = 0

    def encode():
        for w in range(n_wires):
            if w < n_features:
                ops.append(FeatureGate("RX", (w,), w))
            else:
                ops.append(FixedGate(Gate("H", (w,))))

    for _ in range(repetitions):
        encode()
        for w in range(n_wires):
            ops.append(WeightGate("ZZ", (w, (w + 1) % n_wires), k))
            k += 1
        for w in range(n_wires):
            ops.append(WeightGate("RY", (w,), k))
            k += 1
    encode()
    return ParamCircuit(
        n_wires, ops, k, n_features,
        name=f"qaoa(n_wires={n_wires}, n_features={n_features}, reps={repetitions})",
    )


def permute_features(circuit: ParamCircuit, permutation) -> ParamCircuit:
    """Rename feature ``i`` to ``permutation[i]``; weights are untouched."""
    perm = np.asarray(permutation)
    if perm.shape != (circuit.n_features,) or sorted(perm.tolist()) != list(range(circuit.n_features)):
        raise StructuralError(f"not a permutation of range({circuit.n_features}): {permutation!r}")
    ops = [
        FeatureGate(op.kind, op.wires, int(perm[op.feature_index]), op.scale)
        if isinstance(op, FeatureGate) else op
        for op in circuit.ops
    ]
    return ParamCircuit(circuit.n_qubits, ops, circuit.n_weights, circuit.n_features, name=circuit.name)


def _check_bindings(circuit, weights, features):
    if weights.shape[-1] != circuit.n_weights:
        raise StructuralError(f"expected {circuit.n_weights} weights, got {weights.shape[-1]}")
    if features.shape[-1] != circuit.n_features:
        raise StructuralError(f"expected {circuit.n_features} features, got {features.shape[-1]}")


def bound_ops(circuit, weights, features):
    """Yield ``(op, angles)`` with per-row angles bound (``None`` for ``H``)."""
    for op in circuit.ops:
        if isinstance(op, FixedGate):
            yield op, op.gate.angle
        elif isinstance(op, WeightGate):
            yield op, weights[:, op.weight_index]
        else:
            yield op, op.scale * features[:, op.feature_index]


def apply_op(psi, n_qubits, kind, wires, angles):
    """Apply one gate kind with scalar or per-row angles to ``psi`` in place."""
    if kind == "ZZ":
        return apply_zz(psi, n_qubits, wires, angles)
    if kind == "H":
        return apply_1q(psi, n_qubits, wires[0], gate_matrix("H"))
    angles = np.asarray(angles, dtype=float)
    mats = rotation_matrices(kind, angles) if angles.ndim else gate_matrix(kind, float(angles))
    return apply_1q(psi, n_qubits, wires[0], mats)


def _simulate(circuit, weights, features):
    """Final states for row-wise bound ``(B, n_weights)`` / ``(B, n_features)``."""
    psi = np.zeros((weights.shape[0], 2**circuit.n_qubits), dtype=complex)
    psi[:, 0] = 1.0
    for op, angles in bound_ops(circuit, weights, features):
        apply_op(psi, circuit.n_qubits, op.kind, op.wires, angles)
    return psi


def broadcast_bindings(circuit, weights, features):
    weights = np.atleast_2d(np.asarray(weights, dtype=float))
    features = np.atleast_2d(np.asarray(features, dtype=float))
    _check_bindings(circuit, weights, features)
    batch = max(weights.shape[0], features.shape[0])
    if weights.shape[0] not in (1, batch) or features.shape[0] not in (1, batch):
        raise StructuralError(f"cannot broadcast {weights.shape[0]} weight rows with {features.shape[0]} feature rows")
    weights = np.broadcast_to(weights, (batch, circuit.n_weights))
    features = np.broadcast_to(features, (batch, circuit.n_features))
    return weights, features


def final_states(circuit: ParamCircuit, weights, features) -> np.ndarray:
    """Pre-measurement states, one row per (broadcast) binding."""
    weights, features = broadcast_bindings(circuit, weights, features)
    chunk = max(1, _CHUNK_AMPLITUDES // 2**circuit.n_qubits)
    parts = [
        _simulate(circuit, weights[i:i + chunk], features[i:i + chunk])
        for i in range(0, weights.shape[0], chunk)
    ]
    return np.concatenate(parts, axis=0)


def evaluate_batch(circuit: ParamCircuit, weights, features, readout_wire: int = 0) -> np.ndarray:
    """``p1`` for every row; 1-D weights/features broadcast against 2-D ones."""
    if not 0 <= readout_wire < circuit.n_qubits:
        raise StructuralError(f"readout wire {readout_wire} out of range")
    weights, features = broadcast_bindings(circuit, weights, features)
    chunk = max(1, _CHUNK_AMPLITUDES // 2**circuit.n_qubits)
    out = np.empty(weights.shape[0])
    for i in range(0, weights.shape[0], chunk):
        psi = _simulate(circuit, weights[i:i + chunk], features[i:i + chunk])
        out[i:i + chunk] = batch_prob_one(psi, circuit.n_qubits, readout_wire)
    return np.clip(out, 0.0, 1.0)


def evaluate(circuit: ParamCircuit, weights, features, readout_wire: int = 0) -> ModelOutput:
    weights = np.asarray(weights, dtype=float)
    features = np.asarray(features, dtype=float)
    if weights.ndim != 1 or features.ndim != 1:
        raise StructuralError("evaluate binds one weight vector and one feature vector")
    return ModelOutput(float(evaluate_batch(circuit, weights, features, readout_wire)[0]))


def bloch_batch(circuit: ParamCircuit, weights, features) -> np.ndarray:
    """``(B, 3)`` Bloch vectors of a single-qubit circuit's final states."""
    if circuit.n_qubits != 1:
        raise StructuralError(f"Bloch coordinates need a single-qubit circuit, got {circuit.n_qubits} qubits")
    return batch_bloch(final_states(circuit, weights, features))
