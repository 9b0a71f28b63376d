"""Naive Bayes over discretized predictors with Laplace (+1) smoothing.

Range fields are equal-frequency binned at fit time; set fields use their
levels directly. Likelihoods are class-conditional category frequencies;
the posterior is computed in log space and normalized, so predict_proba is
the exact Bayes posterior for the fitted tables.
"""

from __future__ import annotations

import numpy as np

from ..preprocess import assign_bins, discretize
from .base import BaseFaultClassifier

_UNUSED_THRESHOLD = 1e-3


class NBayesClassifier(BaseFaultClassifier):
    """Categorical naive Bayes; the suite's 'Bayesian' family member."""

    def __init__(self, bins: int = 5, laplace: float = 1.0, set_fields: tuple = ()):
        self.bins = bins
        self.laplace = laplace
        self.set_fields = set_fields

    def _fit(self, X, y):
        set_fields = frozenset(self.set_fields)
        n, p = X.shape
        self.bin_edges_ = {}
        cats = np.empty_like(X)
        for j in range(p):
            if j in set_fields:
                cats[:, j] = X[:, j]
            else:
                edges, assigned = discretize(X[:, j], self.bins)
                self.bin_edges_[j] = edges
                cats[:, j] = assigned

        n1 = int((y == 1.0).sum())
        n0 = n - n1
        self.log_priors_ = np.log(np.array([n0, n1]) / n)
        # Per field: ordered category values, log-likelihood table (2 x cats),
        # and the smoothed log-likelihood for a category unseen in training.
        self.categories_ = []
        self.log_likelihood_ = []
        self.log_unseen_ = []
        for j in range(p):
            levels = np.unique(cats[:, j])
            table = np.empty((2, levels.size))
            for cls, cls_n in ((0, n0), (1, n1)):
                mask = y == float(cls)
                for c, level in enumerate(levels):
                    count = int((cats[mask, j] == level).sum())
                    table[cls, c] = (count + self.laplace) / (
                        cls_n + self.laplace * levels.size
                    )
            self.categories_.append(tuple(float(v) for v in levels))
            self.log_likelihood_.append(np.log(table))
            self.log_unseen_.append(
                np.log(
                    np.array(
                        [
                            self.laplace / (n0 + self.laplace * levels.size),
                            self.laplace / (n1 + self.laplace * levels.size),
                        ]
                    )
                )
            )

    def _categorize(self, X) -> np.ndarray:
        cats = np.empty_like(X)
        for j in range(X.shape[1]):
            edges = self.bin_edges_.get(j)
            cats[:, j] = X[:, j] if edges is None else assign_bins(X[:, j], edges)
        return cats

    def _proba(self, X):
        cats = self._categorize(X)
        n, p = cats.shape
        log_post = np.tile(self.log_priors_, (n, 1))
        for j in range(p):
            index = {v: c for c, v in enumerate(self.categories_[j])}
            for i in range(n):
                c = index.get(float(cats[i, j]))
                if c is None:
                    log_post[i] += self.log_unseen_[j]
                else:
                    log_post[i] += self.log_likelihood_[j][:, c]
        shifted = log_post - log_post.max(axis=1, keepdims=True)
        weights = np.exp(shifted)
        return weights[:, 1] / weights.sum(axis=1)

    def _used_fields(self):
        used = []
        for j, table in enumerate(self.log_likelihood_):
            if np.abs(table[1] - table[0]).max() >= _UNUSED_THRESHOLD:
                used.append(j)
        return tuple(used)

    def _to_json_dict(self) -> dict:
        if self.constant_class_ is not None:
            return {"constant_class": self.constant_class_}
        return {
            "bin_edges": {str(j): list(e) for j, e in self.bin_edges_.items()},
            "log_priors": self.log_priors_.tolist(),
            "categories": [list(c) for c in self.categories_],
            "log_likelihood": [t.tolist() for t in self.log_likelihood_],
            "log_unseen": [u.tolist() for u in self.log_unseen_],
        }

    def _restore_state(self, state: dict, n_features: int) -> None:
        self.n_features_in_ = n_features
        self.warning_ = None
        self.constant_class_ = state.get("constant_class")
        if self.constant_class_ is None:
            self.bin_edges_ = {
                int(j): tuple(float(v) for v in e)
                for j, e in state["bin_edges"].items()
            }
            self.log_priors_ = np.array(state["log_priors"])
            self.categories_ = [tuple(float(v) for v in c) for c in state["categories"]]
            self.log_likelihood_ = [np.array(t) for t in state["log_likelihood"]]
            self.log_unseen_ = [np.array(u) for u in state["log_unseen"]]
        else:
            self.warning_ = "single-class training set; model predicts a constant"
        self.fitted_ = True
