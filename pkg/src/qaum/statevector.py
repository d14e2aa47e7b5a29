"""Dense statevector simulation.

Wire 0 is the most significant bit of the basis index, so ``|10>`` on two
qubits is amplitude index 2.  Rotations use the half-angle convention
``R_P(theta) = exp(-i theta P / 2)`` and ``ZZ(theta) = exp(-i theta Z(x)Z / 2)``.

Besides the single-state API (:func:`init_zero`, :func:`apply_gate`, ...)
this module holds the batched kernels used by circuit evaluation: a batch
of states is a ``(B, 2**n)`` complex array and every gate angle may differ
per row.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigurationError, StructuralError

MAX_QUBITS = 12

GATE_KINDS = ("H", "RX", "RY", "RZ", "ZZ")
ROTATION_KINDS = ("RX", "RY", "RZ", "ZZ")

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_HADAMARD = np.array([[_INV_SQRT2, _INV_SQRT2], [_INV_SQRT2, -_INV_SQRT2]], dtype=complex)


@dataclass(frozen=True, eq=False)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.n_qubits,):
            raise StructuralError(
                f"expected {2**self.n_qubits} amplitudes for {self.n_qubits} qubits, got shape {amps.shape}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def __eq__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.n_qubits == other.n_qubits and np.array_equal(self.amplitudes, other.amplitudes)

    def __hash__(self):
        return hash((self.n_qubits, self.amplitudes.tobytes()))

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))


@dataclass(frozen=True)
class Gate:
    kind: str
    wires: tuple
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise StructuralError(f"unknown gate kind {self.kind!r}")
        wires = tuple(int(w) for w in np.atleast_1d(self.wires))
        object.__setattr__(self, "wires", wires)
        arity = 2 if self.kind == "ZZ" else 1
        if len(wires) != arity:
            raise StructuralError(f"{self.kind} acts on {arity} wire(s), got {wires}")
        if arity == 2 and wires[0] == wires[1]:
            raise StructuralError(f"ZZ needs two distinct wires, got {wires}")
        if self.kind == "H":
            if self.angle is not None:
                raise StructuralError("H takes no angle")
        elif self.angle is None:
            raise StructuralError(f"{self.kind} needs an angle")
        else:
            object.__setattr__(self, "angle", float(self.angle))


def gate_matrix(kind: str, angle: float | None = None) -> np.ndarray:
    """Unitary of a gate; 2x2 for one-wire kinds, 4x4 for ZZ."""
    if kind == "H":
        return _HADAMARD.copy()
    if kind == "ZZ":
        phase = np.exp(-0.5j * angle)
        return np.diag([phase, phase.conjugate(), phase.conjugate(), phase])
    return rotation_matrices(kind, np.array([angle], dtype=float))[0]


def rotation_matrices(kind: str, angles) -> np.ndarray:
    """Stack of ``(B, 2, 2)`` rotation matrices for a vector of angles."""
    theta = np.asarray(angles, dtype=float)
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    if kind == "RX":
        out[..., 0, 0] = c
        out[..., 0, 1] = -1j * s
        out[..., 1, 0] = -1j * s
        out[..., 1, 1] = c
    elif kind == "RY":
        out[..., 0, 0] = c
        out[..., 0, 1] = -s
        out[..., 1, 0] = s
        out[..., 1, 1] = c
    elif kind == "RZ":
        out[..., 0, 0] = c - 1j * s
        out[..., 0, 1] = 0
        out[..., 1, 0] = 0
        out[..., 1, 1] = c + 1j * s
    else:
        raise StructuralError(f"{kind} is not a single-wire rotation")
    return out


def init_zero(n_qubits: int) -> StateVector:
    if not isinstance(n_qubits, (int, np.integer)) or not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigurationError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits!r}")
    amps = np.zeros(2**n_qubits, dtype=complex)
    amps[0] = 1.0
    return StateVector(int(n_qubits), amps)


def _check_wires(wires, n_qubits):
    for w in wires:
        if not 0 <= w < n_qubits:
            raise StructuralError(f"wire {w} out of range for {n_qubits} qubit(s)")


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Return ``U @ state`` as a new state."""
    _check_wires(gate.wires, state.n_qubits)
    batch = state.amplitudes[None, :].copy()
    if gate.kind == "ZZ":
        batch = apply_zz(batch, state.n_qubits, gate.wires, np.array([gate.angle]))
    else:
        batch = apply_1q(batch, state.n_qubits, gate.wires[0], gate_matrix(gate.kind, gate.angle))
    return StateVector(state.n_qubits, batch[0])


def prob_one(state: StateVector, wire: int) -> float:
    """Probability of reading 1 on ``wire``."""
    _check_wires((wire,), state.n_qubits)
    return float(batch_prob_one(state.amplitudes[None, :], state.n_qubits, wire)[0])


def prob_zero(state: StateVector, wire: int) -> float:
    return 1.0 - prob_one(state, wire)


def bloch_coordinates(state: StateVector) -> tuple[float, float, float]:
    """``(<X>, <Y>, <Z>)`` of a single-qubit state."""
    if state.n_qubits != 1:
        raise StructuralError(f"Bloch coordinates need a single qubit, got {state.n_qubits}")
    return tuple(float(v) for v in batch_bloch(state.amplitudes[None, :])[0])


# batched kernels -----------------------------------------------------------


def apply_1q(psi: np.ndarray, n_qubits: int, wire: int, matrices: np.ndarray) -> np.ndarray:
    """Apply one single-wire gate to every row of ``psi``.

    ``matrices`` is either one ``(2, 2)`` matrix shared by all rows or a
    ``(B, 2, 2)`` stack.  ``psi`` is updated in place and returned.
    """
    view = psi.reshape(psi.shape[0], 2**wire, 2, 2 ** (n_qubits - wire - 1))
    a0 = view[:, :, 0, :].copy()
    a1 = view[:, :, 1, :]
    if matrices.ndim == 2:
        m00, m01, m10, m11 = matrices[0, 0], matrices[0, 1], matrices[1, 0], matrices[1, 1]
    else:
        m = matrices[:, :, :, None, None]
        m00, m01, m10, m11 = m[:, 0, 0], m[:, 0, 1], m[:, 1, 0], m[:, 1, 1]
    view[:, :, 0, :] = m00 * a0 + m01 * a1
    view[:, :, 1, :] = m10 * a0 + m11 * a1
    return psi


_ZZ_SIGNS: dict = {}


def zz_signs(n_qubits: int, wires) -> np.ndarray:
    """Eigenvalues of Z(x)Z on ``wires`` for every basis index."""
    key = (n_qubits, tuple(wires))
    if key not in _ZZ_SIGNS:
        idx = np.arange(2**n_qubits)
        bits = [(idx >> (n_qubits - 1 - w)) & 1 for w in wires]
        _ZZ_SIGNS[key] = (1 - 2 * bits[0]) * (1 - 2 * bits[1])
    return _ZZ_SIGNS[key]


def apply_zz(psi: np.ndarray, n_qubits: int, wires, angles) -> np.ndarray:
    """Apply ``ZZ(angle_b)`` to row ``b`` of ``psi`` in place."""
    signs = zz_signs(n_qubits, wires)
    theta = np.broadcast_to(np.asarray(angles, dtype=float), (psi.shape[0],))
    psi *= np.exp(-0.5j * theta[:, None] * signs[None, :])
    return psi


def batch_prob_one(psi: np.ndarray, n_qubits: int, wire: int) -> np.ndarray:
    view = psi.reshape(psi.shape[0], 2**wire, 2, -1)
    return np.sum(np.abs(view[:, :, 1, :]) ** 2, axis=(1, 2))


def batch_bloch(psi: np.ndarray) -> np.ndarray:
    """Bloch vectors of a ``(B, 2)`` batch of single-qubit states."""
    a, b = psi[:, 0], psi[:, 1]
    cross = np.conj(a) * b
    x = 2 * cross.real
    y = 2 * cross.imag
    z = np.abs(a) ** 2 - np.abs(b) ** 2
    return np.stack([x, y, z], axis=1)
