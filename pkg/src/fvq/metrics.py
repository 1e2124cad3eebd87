"""Correlation metrics: Pearson, Spearman (average-rank ties)."""

from __future__ import annotations

import numpy as np

from .errors import LengthMismatch, ZeroVariance


def _as_vector(x, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64).ravel()
    if v.size == 0:
        raise LengthMismatch(f"{name} is empty")
    return v


def rank(x) -> np.ndarray:
    """1-based ranks of ``x``; tied values receive their average rank."""
    v = _as_vector(x, "x")
    order = np.argsort(v, kind="stable")
    ranks = np.empty(v.size, dtype=np.float64)
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and v[order[j + 1]] == v[order[i]]:
            j += 1
        # positions i..j (0-based) share the average of ranks i+1..j+1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def pcc(x, y) -> float:
    """Sample Pearson linear correlation coefficient."""
    xv = _as_vector(x, "x")
    yv = _as_vector(y, "y")
    if xv.size != yv.size:
        raise LengthMismatch(f"lengths differ: {xv.size} vs {yv.size}")
    if xv.size < 3:
        raise LengthMismatch(f"need at least 3 points, got {xv.size}")
    dx = xv - xv.mean()
    dy = yv - yv.mean()
    sx = np.sqrt(np.dot(dx, dx))
    sy = np.sqrt(np.dot(dy, dy))
    if sx == 0.0 or sy == 0.0:
        raise ZeroVariance("correlation undefined for a constant input")
    return float(np.dot(dx, dy) / (sx * sy))


def srcc(x, y) -> float:
    """Spearman rank correlation: Pearson correlation of average ranks."""
    xv = _as_vector(x, "x")
    yv = _as_vector(y, "y")
    if xv.size != yv.size:
        raise LengthMismatch(f"lengths differ: {xv.size} vs {yv.size}")
    return pcc(rank(xv), rank(yv))
