"""Univariate outlier detection on optionally-missing value vectors.

Two methods are supported: Tukey fences built from quartiles (iqr) and
standard-score distance from the mean (zscore). Quartiles use linear
interpolation between closest ranks, which is numpy's default percentile
rule; the z-score method uses the population standard deviation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError

IQR = "iqr"
ZSCORE = "zscore"


@dataclass(frozen=True)
class OutlierMethod:
    """Outlier rule: kind 'iqr' (fence multiplier k) or 'zscore' (threshold k)."""

    kind: str = IQR
    k: float = 1.5

    def __post_init__(self):
        if self.kind not in (IQR, ZSCORE):
            raise DataError(f"outlier method must be 'iqr' or 'zscore', got {self.kind!r}")
        if not self.k > 0:
            raise DataError(f"outlier multiplier k must be positive, got {self.k}")

    @classmethod
    def default_for(cls, kind: str) -> "OutlierMethod":
        return cls(kind, 1.5 if kind == IQR else 3.0)


def iqr_fences(values: np.ndarray, k: float) -> tuple[float, float]:
    """Tukey fences [Q1 - k*IQR, Q3 + k*IQR] over the non-missing values."""
    present = values[~np.isnan(values)]
    if present.size < 4:
        raise DataError("iqr fences need at least 4 non-missing values")
    q1, q3 = np.percentile(present, [25.0, 75.0])
    spread = q3 - q1
    return float(q1 - k * spread), float(q3 + k * spread)


def zscore_bounds(values: np.ndarray, k: float) -> tuple[float, float]:
    """Interval mean +- k*sd (population sd) over the non-missing values."""
    present = values[~np.isnan(values)]
    if present.size < 2:
        raise DataError("zscore bounds need at least 2 non-missing values")
    mean = float(present.mean())
    sd = float(present.std())
    return mean - k * sd, mean + k * sd


def outlier_bounds(values, method: OutlierMethod) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64).ravel()
    if method.kind == IQR:
        return iqr_fences(arr, method.k)
    return zscore_bounds(arr, method.k)


def detect_outliers(values, method: OutlierMethod | None = None) -> set[int]:
    """Indices of non-missing values outside the method's bounds.

    Missing values are never flagged. A zero-spread sample flags nothing.
    """
    if method is None:
        method = OutlierMethod()
    arr = np.asarray(values, dtype=np.float64).ravel()
    lo, hi = outlier_bounds(arr, method)
    with np.errstate(invalid="ignore"):
        flagged = (arr < lo) | (arr > hi)
    flagged &= ~np.isnan(arr)
    return set(int(i) for i in np.flatnonzero(flagged))
