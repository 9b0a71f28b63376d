"""Cleaning stage: constant-field removal, outlier handling, imputation, and
the standardization/discretization transforms some classifiers depend on.

The pipeline order is pinned: (1) drop constant fields, (2) apply the outlier
policy, (3) impute. All statistics (fences, means, modes) are learned on the
data passed to fit and reused verbatim on anything passed to transform.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .dataset import Dataset
from .errors import ConfigError, DataError
from .outliers import IQR, ZSCORE, OutlierMethod, detect_outliers, outlier_bounds

OUTLIER_ACTIONS = ("clip_to_fence", "drop_record")
IMPUTATION_KINDS = ("mean", "mode", "drop_record")

# Fields needing at least this many non-missing values to fit fences; below
# it the field's outlier policy is skipped rather than erroring out.
MIN_FENCE_VALUES = 4


@dataclass(frozen=True)
class PreprocessPlan:
    """Serializable description of the cleaning pipeline."""

    outlier_method: OutlierMethod = field(default_factory=OutlierMethod)
    outlier_action: str = "clip_to_fence"
    imputation: str = "mean"
    drop_constant: bool = True
    bins: int = 5

    def __post_init__(self):
        if self.outlier_action not in OUTLIER_ACTIONS:
            raise ConfigError(
                f"outlier_action must be one of {OUTLIER_ACTIONS}, "
                f"got {self.outlier_action!r}"
            )
        if self.imputation not in IMPUTATION_KINDS:
            raise ConfigError(
                f"imputation must be one of {IMPUTATION_KINDS}, got {self.imputation!r}"
            )
        if self.bins < 2:
            raise ConfigError(f"bins must be at least 2, got {self.bins}")

    def to_json_dict(self) -> dict:
        return {
            "outlier.method": self.outlier_method.kind,
            "outlier.k": self.outlier_method.k,
            "outlier.action": self.outlier_action,
            "impute": self.imputation,
            "drop_constant": self.drop_constant,
            "bins": self.bins,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "PreprocessPlan":
        if not isinstance(data, dict):
            raise ConfigError("preprocess plan must be a JSON object")
        known = {"outlier.method", "outlier.k", "outlier.action", "impute",
                 "drop_constant", "bins"}
        for key in data:
            if key not in known:
                raise ConfigError(f"unknown preprocess key {key!r}")
        kind = data.get("outlier.method", IQR)
        if kind not in (IQR, ZSCORE):
            raise ConfigError(f"outlier.method must be iqr or zscore, got {kind!r}")
        k = data.get("outlier.k")
        method = OutlierMethod(kind, float(k)) if k is not None else OutlierMethod.default_for(kind)
        return cls(
            outlier_method=method,
            outlier_action=data.get("outlier.action", "clip_to_fence"),
            imputation=data.get("impute", "mean"),
            drop_constant=bool(data.get("drop_constant", True)),
            bins=int(data.get("bins", 5)),
        )


@dataclass(frozen=True)
class FittedTransform:
    """Per-field statistics learned from training data.

    Only the parts relevant to the operation that produced it are populated.
    Dict payloads are never mutated after construction.
    """

    fill_values: dict | None = None
    means: dict | None = None
    sds: dict | None = None
    fences: dict | None = None


def remove_constant_fields(dataset: Dataset) -> tuple[Dataset, list[str]]:
    """Drop predictors whose non-missing values are all equal.

    Fields that are entirely missing are dropped too. The label is never a
    candidate. Idempotent: a second pass removes nothing.
    """
    removed = []
    keep_cols = []
    for j, spec in enumerate(dataset.schema.predictors):
        col = dataset.X[:, j]
        present = col[~np.isnan(col)]
        if present.size == 0 or np.all(present == present[0]):
            removed.append(spec.name)
        else:
            keep_cols.append(j)
    if not removed:
        return dataset, []
    schema = dataset.schema.without(removed)
    return Dataset(schema, dataset.X[:, keep_cols], dataset.y), removed


def apply_outlier_policy(
    dataset: Dataset,
    method: OutlierMethod,
    action: str,
    fitted: FittedTransform | None = None,
) -> tuple[Dataset, FittedTransform]:
    """Clip range-field values to the training fences, or drop flagged rows.

    Fences come from `fitted` when given, otherwise they are computed on this
    dataset. Fields with fewer than 4 non-missing values get no fences.
    """
    if action not in OUTLIER_ACTIONS:
        raise ConfigError(f"unknown outlier action {action!r}")
    if fitted is None:
        fences = {}
        for j in dataset.schema.range_predictor_indices():
            name = dataset.schema.predictors[j].name
            col = dataset.X[:, j]
            if (~np.isnan(col)).sum() >= MIN_FENCE_VALUES:
                fences[name] = outlier_bounds(col, method)
        fitted = FittedTransform(fences=fences)
    X = np.array(dataset.X, copy=True)
    flagged_rows = np.zeros(dataset.n_records, dtype=bool)
    for j, spec in enumerate(dataset.schema.predictors):
        bounds = (fitted.fences or {}).get(spec.name)
        if bounds is None:
            continue
        lo, hi = bounds
        col = X[:, j]
        with np.errstate(invalid="ignore"):
            outside = (col < lo) | (col > hi)
        outside &= ~np.isnan(col)
        if action == "clip_to_fence":
            X[:, j] = np.clip(col, lo, hi)
        else:
            flagged_rows |= outside
    if action == "drop_record":
        keep = ~flagged_rows
        return Dataset(dataset.schema, X[keep], dataset.y[keep]), fitted
    return Dataset(dataset.schema, X, dataset.y), fitted


def _mode(values: np.ndarray) -> float:
    """Most frequent value; ties broken toward the smallest."""
    uniq, counts = np.unique(values, return_counts=True)
    return float(uniq[np.argmax(counts)])


def impute(
    dataset: Dataset,
    plan: PreprocessPlan,
    fitted: FittedTransform | None = None,
) -> tuple[Dataset, FittedTransform]:
    """Fill missing predictor cells, or drop rows that have any.

    Under "mean", range fields take the training mean and set fields the
    training mode; under "mode" every field takes the mode. The returned
    FittedTransform replays the same fills on unseen data.
    """
    if plan.imputation == "drop_record":
        keep = ~np.isnan(dataset.X).any(axis=1)
        return dataset.subset(np.flatnonzero(keep)), FittedTransform(fill_values={})
    if fitted is None:
        fills = {}
        for j, spec in enumerate(dataset.schema.predictors):
            col = dataset.X[:, j]
            present = col[~np.isnan(col)]
            if present.size == 0:
                raise DataError(
                    f"field {spec.name!r} is entirely missing; cannot impute"
                )
            if plan.imputation == "mean" and spec.is_range:
                fills[spec.name] = float(present.mean())
            else:
                fills[spec.name] = _mode(present)
        fitted = FittedTransform(fill_values=fills)
    X = np.array(dataset.X, copy=True)
    for j, spec in enumerate(dataset.schema.predictors):
        fill = (fitted.fill_values or {}).get(spec.name)
        if fill is None:
            continue
        col = X[:, j]
        col[np.isnan(col)] = fill
    return Dataset(dataset.schema, X, dataset.y), fitted


def standardize(
    dataset: Dataset,
    fitted: FittedTransform | None = None,
) -> tuple[Dataset, FittedTransform]:
    """Map each range predictor to (x - mean) / sd with training statistics.

    Uses the n-1 denominator, so {2, 4, 6} maps to {-1, 0, 1}. Requires
    complete data and errors on zero spread (drop constant fields first).
    """
    if np.isnan(dataset.X).any():
        raise DataError("standardize requires imputed data with no missing values")
    if fitted is None:
        means, sds = {}, {}
        for j in dataset.schema.range_predictor_indices():
            name = dataset.schema.predictors[j].name
            col = dataset.X[:, j]
            if col.size < 2:
                raise DataError(f"field {name!r} has too few values to standardize")
            sd = float(col.std(ddof=1))
            if sd == 0.0:
                raise DataError(f"field {name!r} is constant; cannot standardize")
            means[name] = float(col.mean())
            sds[name] = sd
        fitted = FittedTransform(means=means, sds=sds)
    X = np.array(dataset.X, copy=True)
    for j, spec in enumerate(dataset.schema.predictors):
        if spec.name in (fitted.means or {}):
            X[:, j] = (X[:, j] - fitted.means[spec.name]) / fitted.sds[spec.name]
    return Dataset(dataset.schema, X, dataset.y), fitted


def discretize(values, bins: int = 5) -> tuple[tuple[float, ...], np.ndarray]:
    """Equal-frequency binning: quantile edges plus a bin index per value.

    A value equal to an edge falls in the lower bin. Duplicate or trailing
    edges (heavy ties) are dropped, so fewer than `bins` bins may come back;
    all-equal input yields a single bin.
    """
    vals = np.asarray(values, dtype=np.float64).ravel()
    if vals.size == 0:
        raise DataError("cannot discretize an empty value list")
    if np.isnan(vals).any():
        raise DataError("discretize requires imputed data with no missing values")
    if bins < 2:
        raise ConfigError(f"bins must be at least 2, got {bins}")
    quantiles = np.quantile(vals, np.arange(1, bins) / bins)
    edges = np.unique(quantiles)
    edges = edges[edges < vals.max()]
    assignments = np.searchsorted(edges, vals, side="left")
    return tuple(float(e) for e in edges), assignments


def assign_bins(values, edges) -> np.ndarray:
    """Apply stored discretization edges to new values."""
    vals = np.asarray(values, dtype=np.float64)
    return np.searchsorted(np.asarray(edges, dtype=np.float64), vals, side="left")


class Preprocessor(BaseEstimator, TransformerMixin):
    """Dataset-to-dataset cleaning pipeline with train-only statistics.

    fit learns the constant-field list, the outlier fences, and the fill
    values; transform replays them in the pinned order on any dataset with
    the same schema.
    """

    def __init__(self, plan: PreprocessPlan | None = None):
        self.plan = plan

    def _resolved_plan(self) -> PreprocessPlan:
        return self.plan if self.plan is not None else PreprocessPlan()

    def fit(self, dataset: Dataset, y=None):
        plan = self._resolved_plan()
        if plan.drop_constant:
            reduced, removed = remove_constant_fields(dataset)
        else:
            reduced, removed = dataset, []
        self.removed_fields_ = tuple(removed)
        reduced, self.outlier_fit_ = apply_outlier_policy(
            reduced, plan.outlier_method, plan.outlier_action
        )
        _, self.impute_fit_ = impute(reduced, plan)
        self.schema_ = reduced.schema
        return self

    def transform(self, dataset: Dataset) -> Dataset:
        if not hasattr(self, "schema_"):
            raise DataError("Preprocessor.transform called before fit")
        plan = self._resolved_plan()
        if self.removed_fields_:
            keep = [
                j
                for j, spec in enumerate(dataset.schema.predictors)
                if spec.name not in self.removed_fields_
            ]
            dataset = Dataset(
                dataset.schema.without(list(self.removed_fields_)),
                dataset.X[:, keep],
                dataset.y,
            )
        if dataset.schema != self.schema_:
            raise DataError("dataset schema does not match the fitted schema")
        dataset, _ = apply_outlier_policy(
            dataset, plan.outlier_method, plan.outlier_action, self.outlier_fit_
        )
        dataset, _ = impute(dataset, plan, self.impute_fit_)
        return dataset

    def fit_transform(self, dataset: Dataset, y=None) -> Dataset:
        return self.fit(dataset).transform(dataset)
