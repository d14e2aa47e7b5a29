import os
from functools import reduce
from pathlib import Path

import numpy as np
import pytest
from scipy.linalg import expm

from qaum.circuits import FeatureGate, FixedGate, WeightGate

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

REPO = Path(__file__).resolve().parents[1]


def embed(op, wires, n):
    """Full 2^n operator acting as ``op`` (a tuple of 2x2 factors) on ``wires``; wire 0 is the MSB."""
    factors = [PAULI["I"]] * n
    for w, f in zip(wires, op):
        factors[w] = f
    return reduce(np.kron, factors)


def oracle_unitary(kind, wires, angle, n):
    """Gate unitary via matrix exponentials of Pauli strings, independent of the simulator."""
    if kind == "H":
        return embed((H,), wires, n)
    if kind == "ZZ":
        gen = embed((PAULI["Z"], PAULI["Z"]), wires, n)
    else:
        gen = embed((PAULI[kind[1]],), wires, n)
    return expm(-0.5j * angle * gen)


def oracle_state(circuit, weights, features):
    """Final state by multiplying dense gate matrices in sequence."""
    n = circuit.n_qubits
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1
    for op in circuit.ops:
        if isinstance(op, FixedGate):
            angle = op.gate.angle
        elif isinstance(op, WeightGate):
            angle = weights[op.weight_index]
        else:
            angle = op.scale * features[op.feature_index]
        psi = oracle_unitary(op.kind, op.wires, angle, n) @ psi
    return psi


def oracle_p1(circuit, weights, features, wire=0):
    psi = oracle_state(circuit, weights, features)
    n = circuit.n_qubits
    idx = np.arange(2**n)
    mask = ((idx >> (n - 1 - wire)) & 1) == 1
    return float(np.sum(np.abs(psi[mask]) ** 2))


def central_diff(f, x, h=1e-5):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        out[k] = (f(x + e) - f(x - e)) / (2 * h)
    return out


def make_pulsar_like(n_neg=1200, n_pos=160, seed=0):
    """Synthetic 8-feature, imbalanced two-class data with HTRU2-like layout.

    Class-conditional Gaussians with a few heavy-tailed columns; the classes
    overlap enough that accuracy sits well below 100%.  Used only to exercise
    the pipeline, never to stand in for reported numbers.
    """
    rng = np.random.default_rng(seed)
    mu_neg = np.array([116.0, 47.0, 0.2, 0.4, 8.0, 23.0, 8.9, 110.0])
    mu_pos = np.array([56.0, 38.0, 3.1, 15.5, 50.0, 56.0, 2.8, 18.0])
    sd = np.array([25.0, 6.5, 1.0, 6.0, 25.0, 18.0, 3.5, 90.0])
    neg = mu_neg + sd * rng.standard_normal((n_neg, 8))
    pos = mu_pos + sd * rng.standard_normal((n_pos, 8))
    x = np.vstack([neg, pos])
    y = np.r_[np.zeros(n_neg, dtype=int), np.ones(n_pos, dtype=int)]
    order = rng.permutation(len(y))
    return x[order], y[order]


def write_csv(path, x, y):
    with open(path, "w") as fh:
        for row, label in zip(x, y):
            fh.write(",".join(repr(float(v)) for v in row) + f",{int(label)}\n")
    return path


@pytest.fixture(scope="session")
def synthetic_csv(tmp_path_factory):
    x, y = make_pulsar_like()
    return write_csv(tmp_path_factory.mktemp("data") / "synthetic.csv", x, y)


def htru2_path():
    """Location of the real HTRU2 CSV, if provided: $HTRU2_CSV or data/HTRU_2.csv."""
    env = os.environ.get("HTRU2_CSV")
    candidates = [Path(env)] if env else []
    candidates += [REPO / "data" / "HTRU_2.csv", REPO / "data" / "htru2.csv"]
    for c in candidates:
        if c.is_file():
            return c
    return None
