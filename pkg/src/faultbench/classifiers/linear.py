"""Logistic regression by batch gradient descent on the L2-regularized
negative log-likelihood. Inputs are standardized internally; the bias is
never penalized. Training stops when the gradient's infinity norm drops
below tol or the iteration cap is reached.
"""

from __future__ import annotations

import numpy as np

from .base import BaseFaultClassifier

_UNUSED_THRESHOLD = 1e-3


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _standardize_columns(X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Column-wise (x - mean) / sd; constant columns get sd 1 so they stay 0."""
    mean = X.mean(axis=0)
    sd = X.std(axis=0, ddof=1) if X.shape[0] > 1 else np.ones(X.shape[1])
    sd = np.where(sd == 0.0, 1.0, sd)
    return (X - mean) / sd, mean, sd


def loss_and_grad(params: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float):
    """Mean NLL plus (l2/2)*||w||^2 and its gradient; params = [w..., bias].

    Kept as a standalone function so analytic gradients can be checked
    against finite differences.
    """
    w, b = params[:-1], params[-1]
    z = X @ w + b
    # log(1 + e^z) - y z, evaluated stably
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z)) + 0.5 * l2 * float(w @ w)
    residual = _sigmoid(z) - y
    grad_w = X.T @ residual / X.shape[0] + l2 * w
    grad_b = float(residual.mean())
    return loss, np.append(grad_w, grad_b)


class LogisticRegressionClassifier(BaseFaultClassifier):
    """Plain batch-gradient-descent logistic regression."""

    def __init__(
        self,
        learning_rate: float = 0.5,
        max_iter: int = 20000,
        l2: float = 1e-4,
        tol: float = 1e-6,
    ):
        self.learning_rate = learning_rate
        self.max_iter = max_iter
        self.l2 = l2
        self.tol = tol

    def _fit(self, X, y):
        Xs, self.mean_, self.sd_ = _standardize_columns(X)
        params = np.zeros(X.shape[1] + 1)
        self.n_iter_ = self.max_iter
        for it in range(self.max_iter):
            _, grad = loss_and_grad(params, Xs, y, self.l2)
            if np.abs(grad).max() < self.tol:
                self.n_iter_ = it
                break
            params -= self.learning_rate * grad
        self.coef_ = params[:-1]
        self.intercept_ = float(params[-1])

    def _proba(self, X):
        Xs = (X - self.mean_) / self.sd_
        return _sigmoid(Xs @ self.coef_ + self.intercept_)

    def _used_fields(self):
        return tuple(np.flatnonzero(np.abs(self.coef_) >= _UNUSED_THRESHOLD))

    def _to_json_dict(self) -> dict:
        if self.constant_class_ is not None:
            return {"constant_class": self.constant_class_}
        return {
            "mean": self.mean_.tolist(),
            "sd": self.sd_.tolist(),
            "coef": self.coef_.tolist(),
            "intercept": self.intercept_,
            "n_iter": self.n_iter_,
        }

    def _restore_state(self, state: dict, n_features: int) -> None:
        self.n_features_in_ = n_features
        self.warning_ = None
        self.constant_class_ = state.get("constant_class")
        if self.constant_class_ is None:
            self.mean_ = np.array(state["mean"])
            self.sd_ = np.array(state["sd"])
            self.coef_ = np.array(state["coef"])
            self.intercept_ = float(state["intercept"])
            self.n_iter_ = int(state["n_iter"])
        else:
            self.warning_ = "single-class training set; model predicts a constant"
        self.fitted_ = True
