"""Epsilon-insensitive support vector regression with an RBF kernel.

The dual problem is solved by sequential minimal optimization with
first-order working-set selection (most-violating pair), KKT stopping
tolerance 1e-3 by default, and deterministic lowest-index tie-breaking, so
training is reproducible and invariant to row permutation up to the
equivalent optimum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .errors import DegenerateProblem, DimensionMismatch, LengthMismatch, TooFewRows, ZeroVariance
from .metrics import srcc


@dataclass(frozen=True)
class SvrParams:
    C: float = 10.0
    gamma: float = 0.1
    epsilon: float = 0.1
    tol: float = 1e-3
    max_iter: int = 200_000


@dataclass(frozen=True)
class SvrGrid:
    """Reduced hyperparameter search space."""

    C_values: tuple = (1.0, 10.0, 100.0)
    gamma_values: tuple = (0.01, 0.1, 1.0)
    epsilon_values: tuple = (0.1,)


@dataclass(frozen=True)
class SvrModel:
    support_vectors: np.ndarray   # (n_sv, d) normalized feature rows
    dual_coefs: np.ndarray        # (n_sv,) signed weights, |coef| <= C
    bias: float
    gamma: float
    C: float
    epsilon: float


def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    """exp(-gamma * squared distance) between row sets."""
    sq = (np.sum(a * a, axis=1)[:, None] + np.sum(b * b, axis=1)[None, :]
          - 2.0 * a @ b.T)
    return np.exp(-gamma * np.maximum(sq, 0.0))


def svr_train(rows, targets, params: SvrParams = SvrParams()) -> SvrModel:
    """Solve the epsilon-SVR dual by SMO.

    Expects normalized rows. Constant targets short-circuit to a bias-only
    model (no support vectors) rather than an error.
    """
    x = np.asarray(rows, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64).ravel()
    if x.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D feature matrix, got shape {x.shape}")
    if x.shape[0] != y.size:
        raise DimensionMismatch(f"{x.shape[0]} rows vs {y.size} targets")
    if x.shape[0] < 4:
        raise TooFewRows(f"need at least 4 rows to train, got {x.shape[0]}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DegenerateProblem("rows and targets must be finite")
    if np.ptp(y) == 0.0:
        return SvrModel(
            support_vectors=np.empty((0, x.shape[1])), dual_coefs=np.empty(0),
            bias=float(y[0]), gamma=params.gamma, C=params.C,
            epsilon=params.epsilon,
        )

    n = x.shape[0]
    c = params.C
    kernel = rbf_kernel(x, x, params.gamma)
    tiled = np.vstack([kernel, kernel])   # cache: 2n-long kernel columns
    # 2n-variable dual: first block is alpha (sign +1), second alpha* (sign -1)
    sign = np.concatenate([np.ones(n), -np.ones(n)])
    lin = np.concatenate([params.epsilon - y, params.epsilon + y])
    beta = np.zeros(2 * n)
    neg_sg = -sign * lin          # tracks -sign * gradient
    at_upper = np.zeros(2 * n, dtype=bool)
    at_lower = np.ones(2 * n, dtype=bool)
    pos = sign > 0
    can_up = pos.copy()           # (sign>0 & ~at_upper) | (sign<0 & ~at_lower)
    can_dn = ~pos                 # (sign>0 & ~at_lower) | (sign<0 & ~at_upper)

    for _ in range(params.max_iter):
        up_vals = np.where(can_up, neg_sg, -np.inf)
        dn_vals = np.where(can_dn, neg_sg, np.inf)
        i = int(np.argmax(up_vals))
        j = int(np.argmin(dn_vals))
        gap = up_vals[i] - dn_vals[j]
        if not np.isfinite(gap) or gap <= params.tol:
            break
        ki, kj = i % n, j % n
        curv = kernel[ki, ki] + kernel[kj, kj] - 2.0 * kernel[ki, kj]
        step = gap / max(curv, 1e-12)
        room_i = c - beta[i] if pos[i] else beta[i]
        room_j = beta[j] if pos[j] else c - beta[j]
        step = min(step, room_i, room_j)
        beta[i] += sign[i] * step
        beta[j] -= sign[j] * step
        for t in (i, j):
            if beta[t] < 1e-12:
                beta[t] = 0.0
            elif beta[t] > c - 1e-12:
                beta[t] = c
            at_lower[t] = beta[t] == 0.0
            at_upper[t] = beta[t] == c
            can_up[t] = not at_upper[t] if pos[t] else not at_lower[t]
            can_dn[t] = not at_lower[t] if pos[t] else not at_upper[t]
        neg_sg -= step * (tiled[:, ki] - tiled[:, kj])

    bias = _bias_from_gradient(sign, neg_sg, at_lower, at_upper)
    coefs = sign[:n] * beta[:n] + sign[n:] * beta[n:]
    sv = coefs != 0.0
    return SvrModel(
        support_vectors=x[sv].copy(), dual_coefs=coefs[sv], bias=bias,
        gamma=params.gamma, C=params.C, epsilon=params.epsilon,
    )


def _bias_from_gradient(sign, neg_sg, at_lower, at_upper) -> float:
    """Recover the bias from KKT conditions at the solution.

    Free variables pin the bias exactly; otherwise it is the midpoint of the
    feasible interval implied by the bound variables.
    """
    free = ~at_lower & ~at_upper
    if np.any(free):
        return float(neg_sg[free].mean())
    up_set = (at_lower & (sign > 0)) | (at_upper & (sign < 0))
    low_set = (at_lower & (sign < 0)) | (at_upper & (sign > 0))
    return float((neg_sg[up_set].max() + neg_sg[low_set].min()) / 2.0)


def svr_dual_objective(model_rows, targets, beta, params: SvrParams) -> float:
    """Dual objective value for a 2n coefficient vector (testing hook)."""
    x = np.asarray(model_rows, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64).ravel()
    n = x.shape[0]
    kernel = rbf_kernel(x, x, params.gamma)
    sign = np.concatenate([np.ones(n), -np.ones(n)])
    lin = np.concatenate([params.epsilon - y, params.epsilon + y])
    sb = sign * beta
    diff = sb[:n] + sb[n:]
    return float(0.5 * diff @ kernel @ diff + lin @ beta)


def svr_predict(model: SvrModel, rows) -> float | np.ndarray:
    """Kernel expansion over the support vectors plus bias.

    Rows are evaluated one at a time so a value never depends on what else is
    in the batch: batch and single-row predictions agree bitwise.
    """
    x = np.asarray(rows, dtype=np.float64)
    single = x.ndim == 1
    m = np.atleast_2d(x)
    if model.support_vectors.size and m.shape[1] != model.support_vectors.shape[1]:
        raise DimensionMismatch(
            f"row has {m.shape[1]} features, model expects "
            f"{model.support_vectors.shape[1]}"
        )
    if model.dual_coefs.size == 0:
        out = np.full(m.shape[0], model.bias)
    else:
        sv = model.support_vectors
        out = np.empty(m.shape[0])
        for i in range(m.shape[0]):
            diff = sv - m[i]
            k = np.exp(-model.gamma * np.einsum("ij,ij->i", diff, diff))
            out[i] = k @ model.dual_coefs + model.bias
    return float(out[0]) if single else out


def svr_grid_search(rows, targets, grid: SvrGrid = SvrGrid(), folds: int = 5,
                    seed: int = 0, base: SvrParams = SvrParams()):
    """Pick (C, gamma, epsilon) by k-fold cross-validated rank correlation.

    Returns ``(best_params, best_score, table)`` where table rows are
    ``(params, score)`` in evaluation order. Ties prefer smaller C, then
    smaller gamma, then smaller epsilon; folds that cannot produce a defined
    correlation (constant predictions or too few points) score 0.
    """
    x = np.asarray(rows, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64).ravel()
    if folds < 2:
        raise ValueError(f"need at least 2 folds, got {folds}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    perm = rng.permutation(x.shape[0])
    fold_idx = np.array_split(perm, folds)

    best_params, best_score = None, -np.inf
    table = []
    combos = itertools.product(sorted(grid.C_values), sorted(grid.gamma_values),
                               sorted(grid.epsilon_values))
    for c, gamma, eps in combos:
        params = replace(base, C=float(c), gamma=float(gamma), epsilon=float(eps))
        scores = []
        for test in fold_idx:
            train = np.setdiff1d(perm, test)
            model = svr_train(x[train], y[train], params)
            preds = svr_predict(model, x[test])
            try:
                scores.append(srcc(preds, y[test]))
            except (ZeroVariance, LengthMismatch):
                scores.append(0.0)
        score = float(np.mean(scores))
        table.append((params, score))
        if score > best_score:
            best_params, best_score = params, score
    return best_params, best_score, table


class SupportVectorRegressor(BaseEstimator, RegressorMixin):
    """Estimator facade over the SMO trainer for pipeline composition."""

    def __init__(self, C: float = 10.0, gamma: float = 0.1,
                 epsilon: float = 0.1, tol: float = 1e-3):
        self.C = C
        self.gamma = gamma
        self.epsilon = epsilon
        self.tol = tol

    def fit(self, X, y):
        self.model_ = svr_train(X, y, SvrParams(C=self.C, gamma=self.gamma,
                                                epsilon=self.epsilon, tol=self.tol))
        return self

    def predict(self, X) -> np.ndarray:
        return np.atleast_1d(svr_predict(self.model_, X))
