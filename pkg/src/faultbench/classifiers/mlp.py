"""One-hidden-layer neural network trained by mini-batch backpropagation on
a squared-error loss. All units are logistic; weights start uniform in
(-0.5, 0.5) under the given seed; inputs are standardized internally.
"""

from __future__ import annotations

import numpy as np

from .base import BaseFaultClassifier
from .linear import _sigmoid, _standardize_columns

_UNUSED_THRESHOLD = 1e-3


def _unpack(params: np.ndarray, p: int, h: int):
    i = 0
    W1 = params[i:i + p * h].reshape(p, h); i += p * h
    b1 = params[i:i + h]; i += h
    w2 = params[i:i + h]; i += h
    b2 = params[i]
    return W1, b1, w2, b2


def loss_and_grad(params: np.ndarray, X: np.ndarray, y: np.ndarray, p: int, h: int):
    """Mean 0.5*(output - y)^2 and its gradient over the flattened weights.

    Standalone so the backpropagation can be checked against finite
    differences.
    """
    W1, b1, w2, b2 = _unpack(params, p, h)
    n = X.shape[0]
    hidden = _sigmoid(X @ W1 + b1)
    out = _sigmoid(hidden @ w2 + b2)
    loss = float(np.mean(0.5 * (out - y) ** 2))
    delta_out = (out - y) * out * (1.0 - out) / n
    grad_w2 = hidden.T @ delta_out
    grad_b2 = float(delta_out.sum())
    delta_hidden = np.outer(delta_out, w2) * hidden * (1.0 - hidden)
    grad_W1 = X.T @ delta_hidden
    grad_b1 = delta_hidden.sum(axis=0)
    grad = np.concatenate([grad_W1.ravel(), grad_b1, grad_w2, [grad_b2]])
    return loss, grad


class MlpClassifier(BaseFaultClassifier):
    """Small feed-forward network: p inputs, one logistic hidden layer, one
    logistic output read as the probability of a normal part."""

    def __init__(
        self,
        hidden_units: int = 8,
        epochs: int = 400,
        learning_rate: float = 0.5,
        batch_size: int = 32,
        seed: int = 0,
    ):
        self.hidden_units = hidden_units
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.seed = seed

    def _fit(self, X, y):
        Xs, self.mean_, self.sd_ = _standardize_columns(X)
        n, p = Xs.shape
        h = self.hidden_units
        rng = np.random.default_rng(self.seed)
        params = rng.uniform(-0.5, 0.5, size=p * h + h + h + 1)
        batch = max(1, min(self.batch_size, n))
        for _ in range(self.epochs):
            order = rng.permutation(n)
            for start in range(0, n, batch):
                rows = order[start:start + batch]
                _, grad = loss_and_grad(params, Xs[rows], y[rows], p, h)
                params -= self.learning_rate * grad
        self.W1_, self.b1_, self.w2_, self.b2_ = _unpack(params.copy(), p, h)

    def _proba(self, X):
        Xs = (X - self.mean_) / self.sd_
        hidden = _sigmoid(Xs @ self.W1_ + self.b1_)
        return _sigmoid(hidden @ self.w2_ + self.b2_)

    def _used_fields(self):
        reach = np.abs(self.W1_).max(axis=1)
        return tuple(np.flatnonzero(reach >= _UNUSED_THRESHOLD))

    def _to_json_dict(self) -> dict:
        if self.constant_class_ is not None:
            return {"constant_class": self.constant_class_}
        return {
            "mean": self.mean_.tolist(),
            "sd": self.sd_.tolist(),
            "W1": self.W1_.tolist(),
            "b1": self.b1_.tolist(),
            "w2": self.w2_.tolist(),
            "b2": float(self.b2_),
        }

    def _restore_state(self, state: dict, n_features: int) -> None:
        self.n_features_in_ = n_features
        self.warning_ = None
        self.constant_class_ = state.get("constant_class")
        if self.constant_class_ is None:
            self.mean_ = np.array(state["mean"])
            self.sd_ = np.array(state["sd"])
            self.W1_ = np.array(state["W1"])
            self.b1_ = np.array(state["b1"])
            self.w2_ = np.array(state["w2"])
            self.b2_ = float(state["b2"])
        else:
            self.warning_ = "single-class training set; model predicts a constant"
        self.fitted_ = True
