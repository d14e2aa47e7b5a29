"""Clamped binary cross-entropy and its derivative."""

import numpy as np


def cross_entropy(p1, label, clamp_epsilon=1e-7):
    """``-[y ln q + (1 - y) ln(1 - q)]`` with ``q = clip(p1, eps, 1 - eps)``.

    Works elementwise on arrays; returns a float for scalar input.
    """
    q = np.clip(np.asarray(p1, dtype=float), clamp_epsilon, 1.0 - clamp_epsilon)
    y = np.asarray(label, dtype=float)
    out = -(y * np.log(q) + (1.0 - y) * np.log1p(-q))
    return float(out) if out.ndim == 0 else out


def clamp_derivative(p1, labels, clamp_epsilon=1e-7):
    """``dL/dp1``; zero wherever the clamp is active, boundaries included."""
    p1 = np.asarray(p1, dtype=float)
    labels = np.asarray(labels, dtype=float)
    q = np.clip(p1, clamp_epsilon, 1.0 - clamp_epsilon)
    d = -labels / q + (1.0 - labels) / (1.0 - q)
    inside = (p1 > clamp_epsilon) & (p1 < 1.0 - clamp_epsilon)
    return np.where(inside, d, 0.0)
