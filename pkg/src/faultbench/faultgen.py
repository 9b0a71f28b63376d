"""Synthetic fault injection: replace a controlled fraction of records with
defective ones so classifiers have a labeled benchmark to recover.

The default mode draws replacement sensor values inside the known defective
region (mold temperature > 325.5, hardness > 82, distance <= 23.2), so tree
learners can rediscover those thresholds. The alternative mode perturbs a few
range fields by a multiple of their standard deviation, tying the fault to no
particular region.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import (
    DISTANCE_DEFECT_MAX,
    HARDNESS_THRESHOLD,
    MOLD_THRESHOLD,
    Dataset,
)
from .errors import ConfigError, DataError

MODES = ("rule_region", "field_distortion")

RULE_FIELDS = (
    "Mold temprature",
    "Hardness",
    "Distance between sensitive points and umbilical",
)


@dataclass(frozen=True)
class InjectionSpec:
    """How many records to corrupt, how, and under which seed."""

    fraction: float
    seed: int
    mode: str = "rule_region"
    distortion_scale: float = 2.0

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise ConfigError(f"fraction must lie in [0, 1], got {self.fraction}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.distortion_scale <= 0:
            raise ConfigError(
                f"distortion_scale must be positive, got {self.distortion_scale}"
            )

    def to_json_dict(self) -> dict:
        return {
            "fraction": self.fraction,
            "seed": self.seed,
            "mode": self.mode,
            "distortion_scale": self.distortion_scale,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "InjectionSpec":
        if not isinstance(data, dict):
            raise ConfigError("injection spec must be a JSON object")
        known = {"fraction", "seed", "mode", "distortion_scale"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown injection key {sorted(unknown)[0]!r}")
        return cls(
            fraction=float(data.get("fraction", 0.0)),
            seed=int(data.get("seed", 0)),
            mode=data.get("mode", "rule_region"),
            distortion_scale=float(data.get("distortion_scale", 2.0)),
        )


def inject_faults(dataset: Dataset, spec: InjectionSpec) -> tuple[Dataset, list[int]]:
    """Replace exactly round(fraction * n) records with defective ones.

    Returns the new dataset and the sorted injected row indices. Non-injected
    rows are bitwise unchanged; the same (dataset, spec) pair always produces
    the same output.
    """
    if not dataset.is_labeled:
        raise DataError("injection requires a fully labeled dataset")
    n = dataset.n_records
    count = int(round(spec.fraction * n))
    if count > n:
        raise DataError(f"cannot inject {count} records into a dataset of {n}")
    if count == 0:
        return dataset, []

    rng = np.random.default_rng(spec.seed)
    indices = np.sort(rng.choice(n, size=count, replace=False))
    X = np.array(dataset.X, copy=True)
    y = np.array(dataset.y, copy=True)

    if spec.mode == "rule_region":
        cols = [dataset.schema.predictor_index(name) for name in RULE_FIELDS]
        c_mold, c_hard, c_dist = cols
        mold_hi = dataset.schema.predictors[c_mold].max
        hard_hi = dataset.schema.predictors[c_hard].max
        X[indices, c_mold] = np.minimum(
            MOLD_THRESHOLD + np.maximum(rng.exponential(35.0, size=count), 1e-9),
            mold_hi,
        )
        X[indices, c_hard] = np.minimum(
            HARDNESS_THRESHOLD + np.maximum(rng.exponential(8.0, size=count), 1e-9),
            hard_hi,
        )
        X[indices, c_dist] = rng.uniform(2.0, DISTANCE_DEFECT_MAX, size=count)
    else:
        range_cols = dataset.schema.range_predictor_indices()
        if not range_cols:
            raise DataError("field_distortion needs at least one range field")
        sds = {}
        for j in range_cols:
            col = dataset.X[:, j]
            present = col[~np.isnan(col)]
            sds[j] = float(present.std()) if present.size else 0.0
        for i in indices:
            n_fields = int(rng.integers(1, min(3, len(range_cols)) + 1))
            chosen = rng.choice(len(range_cols), size=n_fields, replace=False)
            for pos in chosen:
                j = range_cols[pos]
                if np.isnan(X[i, j]) or sds[j] == 0.0:
                    continue
                sign = 1.0 if rng.random() < 0.5 else -1.0
                X[i, j] += sign * spec.distortion_scale * sds[j]

    y[indices] = 0.0
    return Dataset(dataset.schema, X, y), [int(i) for i in indices]
