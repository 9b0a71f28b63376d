"""Input validation helpers for estimators and metric functions."""

from __future__ import annotations

import numpy as np

from .errors import DataError


def check_matrix(X, *, allow_nan: bool = False, name: str = "X") -> np.ndarray:
    """Coerce X to a 2-D float64 array, rejecting NaN/inf unless allowed."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DataError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise DataError(f"{name} has no rows")
    if np.isinf(arr).any():
        raise DataError(f"{name} contains infinite values")
    if not allow_nan and np.isnan(arr).any():
        raise DataError(f"{name} contains missing values; impute or drop them first")
    return arr


def check_binary_labels(y, *, n_rows: int | None = None) -> np.ndarray:
    """Coerce y to a float64 vector of 0/1 labels (1 = normal part)."""
    arr = np.asarray(y, dtype=np.float64).ravel()
    if n_rows is not None and arr.shape[0] != n_rows:
        raise DataError(f"labels have length {arr.shape[0]}, expected {n_rows}")
    if np.isnan(arr).any():
        raise DataError("labels contain missing values")
    bad = ~np.isin(arr, (0.0, 1.0))
    if bad.any():
        raise DataError(f"labels must be 0 or 1, found {arr[bad][0]!r}")
    return arr


def check_fitted(estimator, attribute: str) -> None:
    """Raise if the estimator has not been fitted (attribute missing or None)."""
    if getattr(estimator, attribute, None) is None:
        raise DataError(
            f"{type(estimator).__name__} is not fitted; call fit() before predicting"
        )


def check_n_features(X: np.ndarray, n_features: int, name: str = "X") -> None:
    if X.shape[1] != n_features:
        raise DataError(
            f"{name} has {X.shape[1]} columns but the model was fitted on {n_features}"
        )


def check_probability(value: float, name: str = "threshold") -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise DataError(f"{name} must lie in [0, 1], got {value}")
    return value
