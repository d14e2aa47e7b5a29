"""Empirical Fourier spectra of circuit outputs.

With half-angle ``RZ``/``RX`` encodings every pass of a feature through the
circuit contributes an integer frequency in ``{-1, 0, 1}`` to ``p1``, so a
model with ``L`` encodings per feature is a trigonometric polynomial of
degree ``<= L`` in each raw angle.  Sampling ``2K + 1`` equally spaced
angles per feature over ``[0, 2 pi)`` and taking the DFT recovers every
coefficient exactly as long as ``K`` is at least that degree.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .circuits import ParamCircuit, evaluate_batch
from .exceptions import ConfigurationError, StructuralError

MAX_GRID_POINTS = 2**20
ZERO_TOL = 1e-9


@dataclass(frozen=True)
class FourierSpectrum:
    """Coefficients ``c(gamma)`` of ``p1(x) = sum c(gamma) exp(i gamma . x)``.

    ``max_degree`` is the probe degree used for extraction; every
    ``gamma`` in ``{-max_degree..max_degree}^n_features`` is stored.
    """

    n_features: int
    max_degree: int
    coefficients: dict = field(repr=False)

    def coefficient(self, gamma) -> complex:
        return self.coefficients.get(tuple(int(g) for g in gamma), 0j)

    def as_array(self) -> np.ndarray:
        """Dense array indexed by ``gamma + max_degree`` along each axis."""
        k = 2 * self.max_degree + 1
        out = np.zeros((k,) * self.n_features, dtype=complex)
        for gamma, c in self.coefficients.items():
            out[tuple(g + self.max_degree for g in gamma)] = c
        return out

    def hermitian_defect(self) -> float:
        """``max |c(-gamma) - conj(c(gamma))|``; zero for a real-valued model."""
        return max(
            (abs(self.coefficient(tuple(-g for g in gamma)) - np.conj(c)) for gamma, c in self.coefficients.items()),
            default=0.0,
        )

    def synthesize(self, features) -> np.ndarray:
        """Re-evaluate the truncated series at rows of ``features``."""
        x = np.atleast_2d(np.asarray(features, dtype=float))
        gammas = np.array(list(self.coefficients), dtype=float).reshape(-1, self.n_features)
        coefs = np.array(list(self.coefficients.values()), dtype=complex)
        return (np.exp(1j * x @ gammas.T) @ coefs).real

    def to_dict(self) -> dict:
        return {
            "n_features": self.n_features,
            "max_degree": self.max_degree,
            "coefficients": [
                {"gamma": list(gamma), "re": float(c.real), "im": float(c.imag)}
                for gamma, c in sorted(self.coefficients.items())
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d) -> "FourierSpectrum":
        coefs = {tuple(e["gamma"]): complex(e["re"], e["im"]) for e in d["coefficients"]}
        return cls(int(d["n_features"]), int(d["max_degree"]), coefs)


def grid_angles(probe: int) -> np.ndarray:
    k = 2 * probe + 1
    return 2 * np.pi * np.arange(k) / k


def _spectrum_from_grid(values: np.ndarray, probe: int) -> FourierSpectrum:
    k = 2 * probe + 1
    n = values.ndim
    # p(x) = sum_g c_g e^{i g x}  ->  c_g = mean_j p(x_j) e^{-i g x_j} = fftn / k^n
    coefs = np.fft.fftn(values) / values.size
    out = {}
    for idx in itertools.product(range(k), repeat=n):
        gamma = tuple(i if i <= probe else i - k for i in idx)
        out[gamma] = complex(coefs[idx])
    return FourierSpectrum(n, probe, out)


def extract_spectrum(
    circuit: ParamCircuit, weights, max_degree_probe: int, readout_wire: int = 0
) -> FourierSpectrum:
    """Full ``n_features``-dimensional spectrum of ``p1`` in the raw encoding angles."""
    probe = int(max_degree_probe)
    if probe < 0:
        raise ConfigurationError("probe degree must be >= 0")
    k = 2 * probe + 1
    n = circuit.n_features
    if n == 0:
        p = evaluate_batch(circuit, weights, np.zeros((1, 0)), readout_wire)
        return FourierSpectrum(0, probe, {(): complex(p[0])})
    if k**n > MAX_GRID_POINTS:
        raise ConfigurationError(
            f"grid of {k}^{n} = {k**n} points exceeds the {MAX_GRID_POINTS} point guard; "
            "use extract_feature_spectrum for wide models"
        )
    axes = np.meshgrid(*([grid_angles(probe)] * n), indexing="ij")
    grid = np.stack([a.ravel() for a in axes], axis=1)
    p = evaluate_batch(circuit, weights, grid, readout_wire).reshape((k,) * n)
    return _spectrum_from_grid(p, probe)


def extract_feature_spectrum(
    circuit: ParamCircuit, weights, feature_index: int, base_features, max_degree_probe: int, readout_wire: int = 0
) -> FourierSpectrum:
    """One-dimensional spectrum along one feature with the others frozen."""
    if not 0 <= feature_index < circuit.n_features:
        raise StructuralError(f"feature index {feature_index} out of range")
    probe = int(max_degree_probe)
    base = np.asarray(base_features, dtype=float)
    if base.shape != (circuit.n_features,):
        raise StructuralError(f"expected {circuit.n_features} base features, got shape {base.shape}")
    grid = np.tile(base, (2 * probe + 1, 1))
    grid[:, feature_index] = grid_angles(probe)
    return _spectrum_from_grid(evaluate_batch(circuit, weights, grid, readout_wire), probe)


def frequency_multiplicities(L: int) -> dict:
    """Number of index pairings landing on each degree ``d``: ``C(2L, L - d)``."""
    if L < 1:
        raise ConfigurationError(f"L must be >= 1, got {L}")
    return {d: math.comb(2 * L, L - d) for d in range(-L, L + 1)}


def enumerate_multiplicities(L: int) -> dict:
    """Brute-force count of ``sum_m (lam_i[m] - lam_j[m]) / 2`` over all sign choices."""
    counts = {}
    for lam_i in itertools.product((-1, 1), repeat=L):
        for lam_j in itertools.product((-1, 1), repeat=L):
            d = (sum(lam_i) - sum(lam_j)) // 2
            counts[d] = counts.get(d, 0) + 1
    return dict(sorted(counts.items()))


@dataclass(frozen=True)
class TruncationReport:
    max_leakage: float
    passed: bool
    degree: int
    probe: int

    def to_dict(self):
        return {"max_leakage": self.max_leakage, "pass": self.passed, "degree": self.degree, "probe": self.probe}


def verify_truncation(spectrum: FourierSpectrum, L: int, tol: float = ZERO_TOL) -> TruncationReport:
    """Largest coefficient outside ``{-L..L}^N``; passes iff it is below ``tol``."""
    if spectrum.max_degree < L + 2:
        raise ConfigurationError(
            f"spectrum probed to degree {spectrum.max_degree}; need at least L + 2 = {L + 2}"
        )
    leak = max(
        (abs(c) for gamma, c in spectrum.coefficients.items() if any(abs(g) > L for g in gamma)),
        default=0.0,
    )
    return TruncationReport(float(leak), bool(leak < tol), int(L), spectrum.max_degree)
