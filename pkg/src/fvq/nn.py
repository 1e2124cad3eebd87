"""Small fully connected feedforward regressor trained with RMSProp.

Hidden layers use ReLU, the output is linear, and the loss is mean squared
error. Weights use He-style initialization from a seeded PCG64 generator;
the same generator drives the per-epoch shuffles, so training is fully
reproducible from (architecture, hyperparameters, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .errors import DimensionMismatch, NonFiniteLoss


@dataclass(frozen=True)
class NnHyper:
    seed: int
    lr: float = 1e-3
    batch_size: int = 16
    epochs: int = 2000
    rms_decay: float = 0.9
    rms_eps: float = 1e-8


@dataclass
class NnModel:
    layer_sizes: list[int]
    weights: list[np.ndarray]          # per layer, (fan_out, fan_in)
    biases: list[np.ndarray]           # per layer, (fan_out,)
    loss_history: np.ndarray | None = field(default=None, repr=False)


def nn_init(layer_sizes, rng: np.random.Generator) -> NnModel:
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2 or sizes[-1] != 1 or any(s < 1 for s in sizes):
        raise DimensionMismatch(f"bad architecture {sizes}: need [in, ..., 1]")
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        std = np.sqrt(2.0 / fan_in)
        weights.append(rng.normal(0.0, std, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return NnModel(layer_sizes=sizes, weights=weights, biases=biases)


def _forward(model: NnModel, x: np.ndarray):
    """Activations and pre-activations per layer, batch-first."""
    acts = [x]
    pre = []
    a = x
    for idx, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ w.T + b
        pre.append(z)
        a = np.maximum(z, 0.0) if idx < len(model.weights) - 1 else z
        acts.append(a)
    return acts, pre


def nn_predict(model: NnModel, rows) -> float | np.ndarray:
    x = np.asarray(rows, dtype=np.float64)
    single = x.ndim == 1
    m = np.atleast_2d(x)
    if m.shape[1] != model.layer_sizes[0]:
        raise DimensionMismatch(
            f"row has {m.shape[1]} features, network expects {model.layer_sizes[0]}"
        )
    out = _forward(model, m)[0][-1][:, 0]
    return float(out[0]) if single else out


def nn_loss_and_gradients(model: NnModel, x: np.ndarray, y: np.ndarray):
    """Mean-squared-error loss and analytic parameter gradients for a batch."""
    acts, pre = _forward(model, x)
    pred = acts[-1][:, 0]
    err = pred - y
    loss = float(np.mean(err * err))

    grad_w = [None] * len(model.weights)
    grad_b = [None] * len(model.biases)
    delta = (2.0 * err / x.shape[0])[:, None]
    for layer in range(len(model.weights) - 1, -1, -1):
        grad_w[layer] = delta.T @ acts[layer]
        grad_b[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ model.weights[layer]) * (pre[layer - 1] > 0.0)
    return loss, grad_w, grad_b


def nn_train(rows, targets, layer_sizes, hyper: NnHyper) -> NnModel:
    """Mini-batch RMSProp on MSE; aborts with NonFiniteLoss on divergence.

    The returned model carries ``loss_history`` with the full-batch loss
    before training (epoch 0) followed by one entry per epoch.
    """
    x = np.asarray(rows, dtype=np.float64)
    y = np.asarray(targets, dtype=np.float64).ravel()
    if x.ndim != 2 or x.shape[0] != y.size:
        raise DimensionMismatch(f"rows {x.shape} do not match {y.size} targets")
    if x.shape[1] != int(layer_sizes[0]):
        raise DimensionMismatch(
            f"architecture expects {layer_sizes[0]} inputs, rows have {x.shape[1]}"
        )
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(hyper.seed)))
    model = nn_init(layer_sizes, rng)
    cache_w = [np.zeros_like(w) for w in model.weights]
    cache_b = [np.zeros_like(b) for b in model.biases]

    history = [nn_loss_and_gradients(model, x, y)[0]]
    n = x.shape[0]
    for epoch in range(hyper.epochs):
        order = rng.permutation(n)
        for start in range(0, n, hyper.batch_size):
            batch = order[start:start + hyper.batch_size]
            _, gw, gb = nn_loss_and_gradients(model, x[batch], y[batch])
            for layer in range(len(model.weights)):
                cache_w[layer] = (hyper.rms_decay * cache_w[layer]
                                  + (1.0 - hyper.rms_decay) * gw[layer] ** 2)
                cache_b[layer] = (hyper.rms_decay * cache_b[layer]
                                  + (1.0 - hyper.rms_decay) * gb[layer] ** 2)
                model.weights[layer] -= hyper.lr * gw[layer] / (
                    np.sqrt(cache_w[layer]) + hyper.rms_eps)
                model.biases[layer] -= hyper.lr * gb[layer] / (
                    np.sqrt(cache_b[layer]) + hyper.rms_eps)
        epoch_loss = nn_loss_and_gradients(model, x, y)[0]
        if not np.isfinite(epoch_loss):
            raise NonFiniteLoss(f"loss became non-finite at epoch {epoch}")
        history.append(epoch_loss)
    model.loss_history = np.asarray(history)
    return model


def default_architecture(n_features: int) -> list[int]:
    """Default fully connected stack (in-120-64-16-1) for a given input width."""
    return [n_features, 120, 64, 16, 1]


class MlpRegressor(BaseEstimator, RegressorMixin):
    """Estimator facade over the RMSProp trainer."""

    def __init__(self, hidden_sizes=(120, 64, 16), lr: float = 1e-3,
                 batch_size: int = 16, epochs: int = 2000, seed: int = 0):
        self.hidden_sizes = hidden_sizes
        self.lr = lr
        self.batch_size = batch_size
        self.epochs = epochs
        self.seed = seed

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        arch = [X.shape[1], *self.hidden_sizes, 1]
        hyper = NnHyper(seed=self.seed, lr=self.lr,
                        batch_size=self.batch_size, epochs=self.epochs)
        self.model_ = nn_train(X, y, arch, hyper)
        return self

    def predict(self, X) -> np.ndarray:
        return np.atleast_1d(nn_predict(self.model_, X))
