"""Support vector machine trained by sequential minimal optimization on the
dual, with a fitted logistic link so predictions are probabilities.

Inputs are standardized internally; the kernel matrix is precomputed (the
suite targets datasets of a few thousand records). Labels are mapped to
+1 (normal) / -1 (defective) for the dual problem. The scan order of the
working-set heuristics is seeded, so training is deterministic.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigError, DataError
from .base import BaseFaultClassifier
from .linear import _sigmoid, _standardize_columns

KERNELS = ("linear", "rbf")

_ALPHA_EPS = 1e-12


def _kernel_matrix(A: np.ndarray, B: np.ndarray, kernel: str, gamma: float) -> np.ndarray:
    if kernel == "linear":
        return A @ B.T
    sq = (
        (A * A).sum(axis=1)[:, None]
        + (B * B).sum(axis=1)[None, :]
        - 2.0 * (A @ B.T)
    )
    return np.exp(-gamma * np.maximum(sq, 0.0))


def fit_platt_scaling(decision: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Fit P(normal | f) = 1 / (1 + exp(A f + B)) by regularized Newton.

    Targets are shrunk away from 0/1 by the usual (n+1)/(n+2) correction so
    perfectly separated training data cannot push A to infinity.
    """
    n1 = float((y == 1.0).sum())
    n0 = float(y.size - n1)
    hi = (n1 + 1.0) / (n1 + 2.0)
    lo = 1.0 / (n0 + 2.0)
    t = np.where(y == 1.0, hi, lo)
    A, B = 0.0, math.log((n0 + 1.0) / (n1 + 1.0))
    sigma = 1e-12

    def objective(a: float, b: float) -> float:
        z = a * decision + b
        return float(np.sum(np.where(z >= 0, t * z + np.log1p(np.exp(-z)),
                                     (t - 1.0) * z + np.log1p(np.exp(z)))))

    best = objective(A, B)
    for _ in range(100):
        z = A * decision + B
        p = _sigmoid(-z)
        d1 = t - p
        d2 = p * (1.0 - p)
        g1 = float(np.sum(decision * d1))
        g2 = float(np.sum(d1))
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            break
        h11 = float(np.sum(decision * decision * d2)) + sigma
        h22 = float(np.sum(d2)) + sigma
        h12 = float(np.sum(decision * d2))
        det = h11 * h22 - h12 * h12
        dA = -(h22 * g1 - h12 * g2) / det
        dB = -(-h12 * g1 + h11 * g2) / det
        step = 1.0
        while step >= 1e-10:
            cand = objective(A + step * dA, B + step * dB)
            if cand < best + 1e-4 * step * (g1 * dA + g2 * dB):
                A, B = A + step * dA, B + step * dB
                best = cand
                break
            step /= 2.0
        else:
            break
    return A, B


class SmoSvmClassifier(BaseFaultClassifier):
    """Soft-margin SVM solved by SMO with an error cache.

    After convergence every multiplier satisfies the KKT conditions within
    tol; kkt_violations() reports the residuals for verification. With
    track_objective=True, the dual objective is recorded after every
    successful pairwise step.
    """

    def __init__(
        self,
        C: float = 1.0,
        kernel: str = "rbf",
        gamma: float | None = None,
        tol: float = 1e-3,
        max_sweeps: int = 2000,
        seed: int = 0,
        track_objective: bool = False,
    ):
        self.C = C
        self.kernel = kernel
        self.gamma = gamma
        self.tol = tol
        self.max_sweeps = max_sweeps
        self.seed = seed
        self.track_objective = track_objective

    def _fit(self, X, y):
        if self.kernel not in KERNELS:
            raise ConfigError(f"kernel must be one of {KERNELS}, got {self.kernel!r}")
        if self.C <= 0:
            raise ConfigError(f"C must be positive, got {self.C}")
        Xs, self.mean_, self.sd_ = _standardize_columns(X)
        n, p = Xs.shape
        gamma = self.gamma if self.gamma is not None else 1.0 / p
        self.gamma_used_ = float(gamma)
        K = _kernel_matrix(Xs, Xs, self.kernel, gamma)
        ypm = np.where(y == 1.0, 1.0, -1.0)
        C, tol = float(self.C), float(self.tol)
        rng = np.random.default_rng(self.seed)

        alphas = np.zeros(n)
        b = 0.0
        # F[i] = sum_j alpha_j y_j K(j, i); the error is F[i] + b - ypm[i].
        F = np.zeros(n)
        self.objective_path_ = [] if self.track_objective else None

        def dual_value() -> float:
            ay = alphas * ypm
            return float(alphas.sum() - 0.5 * ay @ K @ ay)

        def take_step(i1: int, i2: int) -> bool:
            nonlocal b, F
            if i1 == i2:
                return False
            a1, a2 = alphas[i1], alphas[i2]
            y1, y2 = ypm[i1], ypm[i2]
            E1 = F[i1] + b - y1
            E2 = F[i2] + b - y2
            s = y1 * y2
            if s > 0:
                L, H = max(0.0, a1 + a2 - C), min(C, a1 + a2)
            else:
                L, H = max(0.0, a2 - a1), min(C, C + a2 - a1)
            if L >= H:
                return False
            k11, k12, k22 = K[i1, i1], K[i1, i2], K[i2, i2]
            eta = k11 + k22 - 2.0 * k12
            if eta > 0.0:
                a2_new = a2 + y2 * (E1 - E2) / eta
                a2_new = min(max(a2_new, L), H)
            else:
                # Flat direction: evaluate the objective at both ends.
                f1 = y1 * (E1 + b) - a1 * k11 - s * a2 * k12
                f2 = y2 * (E2 + b) - s * a1 * k12 - a2 * k22
                L1 = a1 + s * (a2 - L)
                H1 = a1 + s * (a2 - H)
                l_obj = (L1 * f1 + L * f2 + 0.5 * L1 * L1 * k11
                         + 0.5 * L * L * k22 + s * L * L1 * k12)
                h_obj = (H1 * f1 + H * f2 + 0.5 * H1 * H1 * k11
                         + 0.5 * H * H * k22 + s * H * H1 * k12)
                if l_obj < h_obj - 1e-12:
                    a2_new = L
                elif l_obj > h_obj + 1e-12:
                    a2_new = H
                else:
                    a2_new = a2
            if abs(a2_new - a2) < 1e-12 * (a2_new + a2 + 1e-12):
                return False
            a1_new = a1 + s * (a2 - a2_new)
            if a1_new < 0.0:
                a1_new = 0.0
            elif a1_new > C:
                a1_new = C
            d1 = y1 * (a1_new - a1)
            d2 = y2 * (a2_new - a2)
            b1 = b - E1 - d1 * k11 - d2 * k12
            b2 = b - E2 - d1 * k12 - d2 * k22
            if _ALPHA_EPS < a1_new < C - _ALPHA_EPS:
                b = b1
            elif _ALPHA_EPS < a2_new < C - _ALPHA_EPS:
                b = b2
            else:
                b = (b1 + b2) / 2.0
            F += d1 * K[i1] + d2 * K[i2]
            alphas[i1] = a1_new
            alphas[i2] = a2_new
            if self.objective_path_ is not None:
                self.objective_path_.append(dual_value())
            return True

        def examine(i2: int) -> int:
            y2 = ypm[i2]
            a2 = alphas[i2]
            E2 = F[i2] + b - y2
            r2 = E2 * y2
            if not ((r2 < -tol and a2 < C - _ALPHA_EPS)
                    or (r2 > tol and a2 > _ALPHA_EPS)):
                return 0
            non_bound = np.flatnonzero(
                (alphas > _ALPHA_EPS) & (alphas < C - _ALPHA_EPS)
            )
            if non_bound.size > 1:
                errors = F[non_bound] + b - ypm[non_bound]
                i1 = int(non_bound[np.argmax(np.abs(errors - E2))])
                if take_step(i1, i2):
                    return 1
            if non_bound.size:
                start = int(rng.integers(non_bound.size))
                for k in range(non_bound.size):
                    if take_step(int(non_bound[(start + k) % non_bound.size]), i2):
                        return 1
            start = int(rng.integers(n))
            for k in range(n):
                if take_step((start + k) % n, i2):
                    return 1
            return 0

        examine_all = True
        num_changed = 0
        sweeps = 0
        while num_changed > 0 or examine_all:
            if sweeps >= self.max_sweeps:
                self.warning_ = f"SMO stopped after {self.max_sweeps} sweeps"
                break
            sweeps += 1
            num_changed = 0
            if examine_all:
                for i2 in range(n):
                    num_changed += examine(i2)
                examine_all = False
            else:
                targets = np.flatnonzero(
                    (alphas > _ALPHA_EPS) & (alphas < C - _ALPHA_EPS)
                )
                for i2 in targets:
                    num_changed += examine(int(i2))
                if num_changed == 0:
                    examine_all = True

        self.alphas_ = alphas
        self.b_ = float(b)
        self.Xs_ = Xs
        self.ypm_ = ypm
        sv = alphas > _ALPHA_EPS
        self.sv_x_ = Xs[sv]
        self.sv_coef_ = (alphas * ypm)[sv]
        decision = self._decision_std(Xs)
        self.platt_a_, self.platt_b_ = fit_platt_scaling(decision, y)

    def _decision_std(self, Xs: np.ndarray) -> np.ndarray:
        """Decision values for already-standardized rows."""
        K = _kernel_matrix(self.sv_x_, Xs, self.kernel, self.gamma_used_)
        return self.sv_coef_ @ K + self.b_

    def decision_function(self, X) -> np.ndarray:
        Xs = (np.asarray(X, dtype=np.float64) - self.mean_) / self.sd_
        return self._decision_std(Xs)

    def _proba(self, X):
        f = self.decision_function(X)
        return _sigmoid(-(self.platt_a_ * f + self.platt_b_))

    def kkt_violations(self) -> np.ndarray:
        """Per-record KKT residuals on the training set.

        alpha = 0 requires margin >= 1, alpha = C requires margin <= 1, and
        in-between multipliers require margin = 1; the residual is how far
        each condition is missed. Available only on freshly fitted models.
        """
        if getattr(self, "Xs_", None) is None:
            raise DataError("KKT residuals need the in-memory fitted model")
        margins = self.ypm_ * self._decision_std(self.Xs_)
        viol = np.empty_like(margins)
        at_zero = self.alphas_ <= _ALPHA_EPS
        at_c = self.alphas_ >= self.C - _ALPHA_EPS
        between = ~(at_zero | at_c)
        viol[at_zero] = np.maximum(0.0, 1.0 - margins[at_zero])
        viol[at_c] = np.maximum(0.0, margins[at_c] - 1.0)
        viol[between] = np.abs(margins[between] - 1.0)
        return viol

    def dual_objective(self) -> float:
        ay = self.alphas_ * self.ypm_
        K = _kernel_matrix(self.Xs_, self.Xs_, self.kernel, self.gamma_used_)
        return float(self.alphas_.sum() - 0.5 * ay @ K @ ay)

    def _used_fields(self):
        probe = self.sv_x_ if self.sv_x_.shape[0] else self.Xs_[:1]
        probe = probe[: min(50, probe.shape[0])]
        h = 1e-2
        used = []
        for j in range(self.n_features_in_):
            shift = np.zeros(self.n_features_in_)
            shift[j] = h
            delta = self._decision_std(probe + shift) - self._decision_std(probe - shift)
            if np.abs(delta).mean() / (2.0 * h) >= 1e-3:
                used.append(j)
        return tuple(used)

    def _to_json_dict(self) -> dict:
        if self.constant_class_ is not None:
            return {"constant_class": self.constant_class_}
        return {
            "mean": self.mean_.tolist(),
            "sd": self.sd_.tolist(),
            "gamma_used": self.gamma_used_,
            "sv_x": self.sv_x_.tolist(),
            "sv_coef": self.sv_coef_.tolist(),
            "intercept": self.b_,
            "platt_a": self.platt_a_,
            "platt_b": self.platt_b_,
        }

    def _restore_state(self, state: dict, n_features: int) -> None:
        self.n_features_in_ = n_features
        self.warning_ = None
        self.constant_class_ = state.get("constant_class")
        if self.constant_class_ is None:
            self.mean_ = np.array(state["mean"])
            self.sd_ = np.array(state["sd"])
            self.gamma_used_ = float(state["gamma_used"])
            self.sv_x_ = np.array(state["sv_x"]).reshape(-1, n_features)
            self.sv_coef_ = np.array(state["sv_coef"])
            self.b_ = float(state["intercept"])
            self.platt_a_ = float(state["platt_a"])
            self.platt_b_ = float(state["platt_b"])
            self.Xs_ = None
        else:
            self.warning_ = "single-class training set; model predicts a constant"
        self.fitted_ = True
