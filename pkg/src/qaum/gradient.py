"""Parameter-shift gradients of ``p1`` and of the clamped cross-entropy.

Every weight slot is a Pauli-generated rotation ``exp(-i w P / 2)`` with
eigenvalues of ``P`` in ``{-1, +1}`` (this includes ``ZZ``), and every
weight appears in exactly one slot, so the two-term rule

    d p1 / d w_k = [p1(w_k + pi/2) - p1(w_k - pi/2)] / 2

is exact.
"""

from __future__ import annotations

import numpy as np

from .circuits import (
    ParamCircuit,
    WeightGate,
    apply_op,
    bound_ops,
    broadcast_bindings,
    evaluate_batch,
    final_states,
)
from .exceptions import ConfigurationError, StructuralError
from .loss import clamp_derivative, cross_entropy
from .statevector import ROTATION_KINDS, apply_1q, zz_signs

_PAULI = {
    "RX": np.array([[0, 1], [1, 0]], dtype=complex),
    "RY": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "RZ": np.array([[1, 0], [0, -1]], dtype=complex),
}

SHIFT = np.pi / 2


def _check_shiftable(circuit):
    for op in circuit.ops:
        if isinstance(op, WeightGate) and op.kind not in ROTATION_KINDS:
            raise StructuralError(f"no shift rule for weight gate {op.kind}")


def _shifted_weights(weights):
    """Rows ``[w, w + s e_0, ..., w + s e_{K-1}, w - s e_0, ...]``."""
    k = weights.shape[0]
    shifts = SHIFT * np.eye(k)
    return np.vstack([weights[None, :], weights + shifts, weights - shifts])


def _check_inputs(circuit, weights, features):
    _check_shiftable(circuit)
    weights = np.asarray(weights, dtype=float)
    features = np.atleast_2d(np.asarray(features, dtype=float))
    if weights.shape != (circuit.n_weights,):
        raise StructuralError(f"expected {circuit.n_weights} weights, got shape {weights.shape}")
    if features.shape[1] != circuit.n_features:
        raise StructuralError(f"expected {circuit.n_features} features, got {features.shape[1]}")
    return weights, features


def jacobian_p1(circuit: ParamCircuit, weights, features, readout_wire: int = 0, method: str = "shift"):
    """``p1`` and ``d p1 / d w`` for every row of ``features``.

    Returns ``(p1, jac)`` with shapes ``(S,)`` and ``(S, n_weights)``.
    ``method="adjoint"`` computes the same derivatives by one forward and
    one backward sweep; it is what makes multi-qubit training affordable.
    """
    if method == "adjoint":
        return jacobian_p1_adjoint(circuit, weights, features, readout_wire)
    if method != "shift":
        raise ConfigurationError(f"unknown gradient method {method!r}")
    weights, features = _check_inputs(circuit, weights, features)
    n_samples, k = features.shape[0], circuit.n_weights
    w_rows = _shifted_weights(weights)
    n_rows = w_rows.shape[0]
    # sample-major layout: every sample sees all 2K+1 weight rows
    p = evaluate_batch(
        circuit,
        np.tile(w_rows, (n_samples, 1)),
        np.repeat(features, n_rows, axis=0),
        readout_wire,
    ).reshape(n_samples, n_rows)
    p1 = p[:, 0]
    jac = 0.5 * (p[:, 1:k + 1] - p[:, k + 1:])
    return p1, jac


def jacobian_p1_adjoint(circuit: ParamCircuit, weights, features, readout_wire: int = 0):
    """Reverse sweep: ``dp1/dw_k = Im <lam_k| P_k |psi_k>`` after gate ``k``."""
    weights, features = _check_inputs(circuit, weights, features)
    if not 0 <= readout_wire < circuit.n_qubits:
        raise StructuralError(f"readout wire {readout_wire} out of range")
    n = circuit.n_qubits
    w_rows, f_rows = broadcast_bindings(circuit, weights, features)
    psi = final_states(circuit, w_rows, f_rows)
    lam = psi.copy()
    view = lam.reshape(lam.shape[0], 2**readout_wire, 2, -1)
    view[:, :, 0, :] = 0.0
    p1 = np.clip(np.einsum("bi,bi->b", psi.conj(), lam).real, 0.0, 1.0)
    jac = np.zeros((psi.shape[0], circuit.n_weights))
    for op, angles in reversed(list(bound_ops(circuit, w_rows, f_rows))):
        if isinstance(op, WeightGate):
            if op.kind == "ZZ":
                p_psi = psi * zz_signs(n, op.wires)[None, :]
            else:
                p_psi = apply_1q(psi.copy(), n, op.wires[0], _PAULI[op.kind])
            jac[:, op.weight_index] = np.einsum("bi,bi->b", lam.conj(), p_psi).imag
        inverse = None if angles is None else -np.asarray(angles)
        apply_op(psi, n, op.kind, op.wires, inverse)
        apply_op(lam, n, op.kind, op.wires, inverse)
    return p1, jac


def grad_p1(circuit: ParamCircuit, weights, features, readout_wire: int = 0) -> np.ndarray:
    features = np.asarray(features, dtype=float)
    if features.ndim != 1:
        raise StructuralError("grad_p1 takes a single feature vector")
    return jacobian_p1(circuit, weights, features[None, :], readout_wire)[1][0]


def loss_and_grad(circuit, weights, features, labels, clamp_epsilon=1e-7, readout_wire=0, method="shift"):
    """Mean clamped cross-entropy over the batch and its weight gradient."""
    features = np.atleast_2d(np.asarray(features, dtype=float))
    labels = np.asarray(labels)
    if features.shape[0] == 0:
        raise ConfigurationError("empty batch")
    if labels.shape != (features.shape[0],):
        raise StructuralError(f"{labels.shape[0]} labels for {features.shape[0]} samples")
    p1, jac = jacobian_p1(circuit, weights, features, readout_wire, method)
    losses = cross_entropy(p1, labels, clamp_epsilon)
    dl = clamp_derivative(p1, labels, clamp_epsilon)
    # fixed-order reduction keeps runs bit-reproducible
    grad = (dl[:, None] * jac).sum(axis=0) / features.shape[0]
    return float(np.mean(losses)), grad, p1


def grad_loss(features, labels, circuit, weights, readout_wire=0, clamp_epsilon=1e-7, method="shift") -> np.ndarray:
    return loss_and_grad(circuit, weights, features, labels, clamp_epsilon, readout_wire, method)[1]
