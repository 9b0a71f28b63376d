"""Shared estimator plumbing: validation, the degenerate single-class case,
and the probability-of-normal prediction contract.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .._validation import (
    check_binary_labels,
    check_fitted,
    check_matrix,
    check_n_features,
)


class BaseFaultClassifier(BaseEstimator, ClassifierMixin):
    """Base for every classifier in the suite.

    Subclasses implement _fit(X, y) and _proba(X). predict_proba returns a
    1-D vector of P(part is normal), not the two-column layout sklearn uses;
    label 1 is normal, label 0 defective.

    A single-class training set short-circuits into a constant model with
    warning_ set, so pipelines degrade instead of crashing.
    """

    def fit(self, X, y):
        X = check_matrix(X, name="X")
        y = check_binary_labels(y, n_rows=X.shape[0])
        self.n_features_in_ = X.shape[1]
        self.warning_ = None
        self.constant_class_ = None
        classes = np.unique(y)
        if classes.size == 1:
            self.constant_class_ = float(classes[0])
            self.warning_ = "single-class training set; model predicts a constant"
        else:
            self._fit(X, y)
        self.fitted_ = True
        return self

    def predict_proba(self, X):
        """Probability that each record is a normal part, in [0, 1]."""
        check_fitted(self, "fitted_")
        X = check_matrix(X, name="X")
        check_n_features(X, self.n_features_in_)
        if self.constant_class_ is not None:
            return np.full(X.shape[0], self.constant_class_, dtype=np.float64)
        return np.clip(self._proba(X), 0.0, 1.0)

    def predict(self, X):
        """Hard labels at the 0.5 threshold; a tie goes to normal."""
        return (self.predict_proba(X) >= 0.5).astype(np.float64)

    def used_field_indices(self) -> tuple[int, ...]:
        """Predictor indices the fitted model actually relies on."""
        check_fitted(self, "fitted_")
        if self.constant_class_ is not None:
            return ()
        return self._used_fields()

    def _fit(self, X, y):
        raise NotImplementedError

    def _proba(self, X):
        raise NotImplementedError

    def _used_fields(self) -> tuple[int, ...]:
        raise NotImplementedError


def class_counts(y) -> tuple[int, int]:
    """(defective, normal) counts of a 0/1 label vector."""
    arr = np.asarray(y)
    n1 = int((arr == 1.0).sum())
    return int(arr.size - n1), n1
