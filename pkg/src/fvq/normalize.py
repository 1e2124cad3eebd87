"""Per-feature min-max normalization learned on the training split."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import DimensionMismatch, TooFewRows

CLIP_LO, CLIP_HI = -0.5, 1.5


@dataclass(frozen=True)
class NormalizationStats:
    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        if self.mins.shape != self.maxs.shape or self.mins.ndim != 1:
            raise DimensionMismatch("normalization stats must be matching 1-D arrays")
        if np.any(self.mins > self.maxs):
            raise DimensionMismatch("per-feature min exceeds max")


def normalize_fit(rows) -> NormalizationStats:
    """Column-wise min/max; constant columns keep min == max."""
    m = np.asarray(rows, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D feature matrix, got shape {m.shape}")
    if m.shape[0] < 2:
        raise TooFewRows(f"need at least 2 rows to fit normalization, got {m.shape[0]}")
    return NormalizationStats(mins=m.min(axis=0), maxs=m.max(axis=0))


def normalize_apply(stats: NormalizationStats, rows) -> np.ndarray:
    """(x - min) / (max - min), clipped to [-0.5, 1.5]; constant features -> 0."""
    x = np.asarray(rows, dtype=np.float64)
    single = x.ndim == 1
    m = np.atleast_2d(x)
    if m.shape[1] != stats.mins.size:
        raise DimensionMismatch(
            f"row has {m.shape[1]} features, stats expect {stats.mins.size}"
        )
    span = stats.maxs - stats.mins
    out = np.zeros_like(m)
    np.divide(m - stats.mins, span, out=out, where=span > 0)
    out = np.clip(out, CLIP_LO, CLIP_HI)
    return out[0] if single else out


class MinMaxClipScaler(BaseEstimator, TransformerMixin):
    """Estimator wrapper so the normalization composes in pipelines."""

    def fit(self, X, y=None):
        self.stats_ = normalize_fit(X)
        return self

    def transform(self, X) -> np.ndarray:
        return normalize_apply(self.stats_, X)
