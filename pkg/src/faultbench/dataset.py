"""Datasets: delimited-text ingestion, per-field profiling, and the bundled
reference benchmark generator.

A dataset is a schema plus a float matrix of predictor values (NaN marks a
missing cell) and a label vector (1 = normal part, 0 = defective, NaN =
unlabeled). Arrays are frozen after construction so datasets can be shared
across threads.

The reference generator produces engine-bracket sensor readings whose labels
follow a fixed pair of ground-truth regions:

    normal    mold temperature <= 325.5 and hardness <= 82
              and distance <= 23.95
    defective everything outside that box

Defective records are drawn mostly inside the high-mold/high-hardness/
low-distance corner, with smaller shares violating only one of the three
conditions, so that learned trees need every threshold to separate the
classes. A small rate of missing cells and far-tail values is mixed in so
profiles show non-trivial Outliers/Null columns.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .outliers import OutlierMethod, detect_outliers
from .schema import Schema, reference_schema

# Ground-truth region thresholds for the reference benchmark.
MOLD_THRESHOLD = 325.5
HARDNESS_THRESHOLD = 82.0
DISTANCE_NORMAL_MAX = 23.95
DISTANCE_DEFECT_MAX = 23.2

# Documented contamination rates for the reference generator.
MISSING_CELL_RATE = 0.006
TAIL_VALUE_RATE = 0.005

# Share of defective records violating only one ground-truth condition.
DEFECT_SHARE_HIGH_HARDNESS = 0.15
DEFECT_SHARE_HIGH_MOLD = 0.15
DEFECT_SHARE_HIGH_DISTANCE = 0.10


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable rows of predictor values plus a binary efficiency label."""

    schema: Schema
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64, copy=True)
        y = np.array(self.y, dtype=np.float64, copy=True).ravel()
        if X.ndim != 2:
            raise DataError(f"X must be 2-dimensional, got shape {X.shape}")
        if X.shape[1] != self.schema.n_predictors:
            raise DataError(
                f"X has {X.shape[1]} columns, schema defines "
                f"{self.schema.n_predictors} predictors"
            )
        if y.shape[0] != X.shape[0]:
            raise DataError("X and y row counts differ")
        present = ~np.isnan(y)
        if not np.isin(y[present], (0.0, 1.0)).all():
            raise DataError("labels must be 0, 1, or missing")
        for j in self.schema.set_predictor_indices():
            col = X[:, j]
            ok = np.isnan(col) | np.isin(col, self.schema.predictors[j].levels)
            if not ok.all():
                bad = col[~ok][0]
                raise DataError(
                    f"value {bad!r} is not a level of set field "
                    f"{self.schema.predictors[j].name!r}"
                )
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n_records(self) -> int:
        return self.X.shape[0]

    @property
    def is_labeled(self) -> bool:
        return bool(np.all(~np.isnan(self.y)))

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.intp)
        return Dataset(self.schema, self.X[idx], self.y[idx])

    def equals(self, other: "Dataset") -> bool:
        return (
            self.schema == other.schema
            and self.X.shape == other.X.shape
            and np.array_equal(self.X, other.X, equal_nan=True)
            and np.array_equal(self.y, other.y, equal_nan=True)
        )


@dataclass(frozen=True)
class FieldProfile:
    """Per-field summary: observed extrema, outlier count, null count."""

    name: str
    kind: str
    min_observed: float | None
    max_observed: float | None
    outlier_count: int | None
    null_count: int


def profile(dataset: Dataset, outlier_method: OutlierMethod | None = None) -> list[FieldProfile]:
    """Summarize every schema field, the label included.

    Range fields report outlier counts under the given method (default iqr
    with k=1.5); set fields have no outlier notion and report None there.
    """
    if dataset.n_records == 0:
        raise DataError("cannot profile an empty dataset")
    if outlier_method is None:
        outlier_method = OutlierMethod()
    profiles = []
    predictor_pos = 0
    for field in dataset.schema.fields:
        if field.role == "label":
            col = dataset.y
        else:
            col = dataset.X[:, predictor_pos]
            predictor_pos += 1
        present = col[~np.isnan(col)]
        null_count = int(np.isnan(col).sum())
        lo = float(present.min()) if present.size else None
        hi = float(present.max()) if present.size else None
        if field.is_range and present.size >= 4:
            outliers = len(detect_outliers(col, outlier_method))
        elif field.is_range:
            outliers = 0
        else:
            outliers = None
        profiles.append(FieldProfile(field.name, field.kind, lo, hi, outliers, null_count))
    return profiles


def render_profile_table(profiles: list[FieldProfile]) -> str:
    """Aligned text table with columns Field/Type/Min/Max/Outliers/Null values."""

    def fmt(v):
        return "--" if v is None else f"{v:.3f}"

    rows = [("", "Field", "Type", "Min", "Max", "Outliers", "Null values")]
    for i, p in enumerate(profiles, start=1):
        rows.append(
            (
                str(i),
                p.name,
                p.kind,
                fmt(p.min_observed),
                fmt(p.max_observed),
                "--" if p.outlier_count is None else str(p.outlier_count),
                str(p.null_count),
            )
        )
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"


def profiles_to_json(profiles: list[FieldProfile]) -> list[dict]:
    return [
        {
            "name": p.name,
            "kind": p.kind,
            "min": p.min_observed,
            "max": p.max_observed,
            "outliers": p.outlier_count,
            "nulls": p.null_count,
        }
        for p in profiles
    ]


def load_delimited(
    path,
    schema: Schema,
    *,
    delimiter: str = ",",
    missing_token: str = "",
) -> Dataset:
    """Read a delimited text file whose header matches the schema field names.

    Cells are stripped of surrounding whitespace; a cell equal to the missing
    token (default: empty string) becomes a missing value. Parse failures
    report the file row and column name.
    """
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh, delimiter=delimiter)
            try:
                header = next(reader)
            except StopIteration:
                raise DataError(f"{path}: file is empty") from None
            header = [cell.strip() for cell in header]
            expected = [f.name for f in schema.fields]
            if header != expected:
                missing = [name for name in expected if name not in header]
                if missing:
                    raise DataError(
                        f"{path}: header mismatch, missing column {missing[0]!r}"
                    )
                extra = [name for name in header if name not in expected]
                if extra:
                    raise DataError(
                        f"{path}: header mismatch, unexpected column {extra[0]!r}"
                    )
                raise DataError(
                    f"{path}: header columns are out of order; expected {expected}"
                )
            label_pos = expected.index(schema.label_field.name)
            rows = []
            for line_no, raw in enumerate(reader, start=2):
                if not raw:
                    continue
                if len(raw) != len(expected):
                    raise DataError(
                        f"{path}: row at line {line_no} has {len(raw)} cells, "
                        f"expected {len(expected)}"
                    )
                parsed = []
                for name, cell in zip(expected, raw):
                    cell = cell.strip()
                    if cell == missing_token:
                        parsed.append(np.nan)
                        continue
                    try:
                        parsed.append(float(cell))
                    except ValueError:
                        raise DataError(
                            f"{path}: cannot parse {cell!r} at line {line_no}, "
                            f"column {name!r}"
                        ) from None
                rows.append(parsed)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    if rows:
        matrix = np.asarray(rows, dtype=np.float64)
    else:
        matrix = np.empty((0, len(schema.fields)), dtype=np.float64)
    y = matrix[:, label_pos] if rows else np.empty(0)
    predictor_cols = [i for i in range(len(schema.fields)) if i != label_pos]
    X = matrix[:, predictor_cols] if rows else np.empty((0, schema.n_predictors))
    return Dataset(schema, X, y)


def save_delimited(
    dataset: Dataset,
    path,
    *,
    delimiter: str = ",",
    missing_token: str = "",
) -> None:
    """Write the dataset with full-precision floats so a reload is exact."""
    names = [f.name for f in dataset.schema.fields]
    label_pos = names.index(dataset.schema.label_field.name)

    def cell(v: float) -> str:
        return missing_token if np.isnan(v) else repr(float(v))

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        writer.writerow(names)
        for i in range(dataset.n_records):
            row = [cell(v) for v in dataset.X[i]]
            row.insert(label_pos, cell(dataset.y[i]))
            writer.writerow(row)


def in_normal_region(mold: float, hardness: float, distance: float) -> bool:
    """Ground-truth membership test for the reference benchmark's normal class."""
    return (
        mold <= MOLD_THRESHOLD
        and hardness <= HARDNESS_THRESHOLD
        and distance <= DISTANCE_NORMAL_MAX
    )


def _defect_mode_counts(n_defective: int) -> tuple[int, int, int, int]:
    n_hard = int(round(DEFECT_SHARE_HIGH_HARDNESS * n_defective))
    n_mold = int(round(DEFECT_SHARE_HIGH_MOLD * n_defective))
    n_dist = int(round(DEFECT_SHARE_HIGH_DISTANCE * n_defective))
    n_corner = n_defective - n_hard - n_mold - n_dist
    return n_corner, n_hard, n_mold, n_dist


def generate_reference(n: int, defect_fraction: float, seed: int) -> Dataset:
    """Seeded synthetic engine-bracket dataset with rule-consistent labels.

    Exactly round(defect_fraction * n) records are defective. All values stay
    inside the schema bounds; the mold-temperature column is pinned to span
    the full schema range whenever both classes are present.
    """
    if not 0.0 <= defect_fraction <= 1.0:
        raise DataError(f"defect_fraction must lie in [0, 1], got {defect_fraction}")
    if n < 10:
        raise DataError(f"need at least 10 records, got {n}")
    n_defective = int(round(defect_fraction * n))
    if defect_fraction > 0 and n_defective == 0:
        raise DataError(
            f"defect_fraction {defect_fraction} rounds to zero defective records for n={n}"
        )
    n_normal = n - n_defective
    rng = np.random.default_rng(seed)
    schema = reference_schema()
    X = np.empty((n, schema.n_predictors), dtype=np.float64)
    y = np.empty(n, dtype=np.float64)

    col = {name: i for i, name in enumerate(schema.predictor_names)}
    c_mold = col["Mold temprature"]
    c_melt = col["Melting temprature"]
    c_hard = col["Hardness"]
    c_mach = col["Machining"]
    c_set = col["Prevet the black pieces"]
    c_dist = col["Distance between sensitive points and umbilical"]
    c_damp = col["Preventing damage"]

    # Class-independent sensor channels; each gets a sparse far tail inside
    # the schema bounds so the quartile fences flag a handful of rows.
    def channel(center, sd, lo, hi, tail_lo, tail_hi):
        vals = np.clip(rng.normal(center, sd, size=n), lo, hi)
        tails = rng.random(n) < TAIL_VALUE_RATE
        vals[tails] = rng.uniform(tail_lo, tail_hi, size=int(tails.sum()))
        return vals

    X[:, c_melt] = channel(720.0, 90.0, 65.0, 2000.0, 1800.0, 2000.0)
    X[:, c_mach] = channel(85.0, 22.0, 0.010, 756.0, 620.0, 756.0)
    X[:, c_damp] = channel(0.5, 0.07, 0.0, 1.0, 0.93, 1.0)
    X[:, c_set] = (rng.random(n) < 0.85).astype(np.float64)

    # Normal rows sit inside the ground-truth box.
    sl = slice(0, n_normal)
    X[sl, c_mold] = rng.uniform(54.0, MOLD_THRESHOLD, size=n_normal)
    X[sl, c_hard] = rng.uniform(5.0, HARDNESS_THRESHOLD, size=n_normal)
    X[sl, c_dist] = rng.uniform(2.0, DISTANCE_NORMAL_MAX, size=n_normal)
    y[sl] = 1.0

    def high_mold(count):
        vals = MOLD_THRESHOLD + np.maximum(rng.exponential(35.0, size=count), 1e-9)
        far = rng.random(count) < 0.05
        vals[far] = rng.uniform(3000.0, 5343.0, size=int(far.sum()))
        return np.minimum(vals, 5343.0)

    def high_hardness(count):
        vals = HARDNESS_THRESHOLD + np.maximum(rng.exponential(8.0, size=count), 1e-9)
        far = rng.random(count) < 0.05
        vals[far] = rng.uniform(300.0, 700.0, size=int(far.sum()))
        return np.minimum(vals, 700.0)

    def high_distance(count):
        vals = DISTANCE_NORMAL_MAX + np.maximum(rng.exponential(7.0, size=count), 1e-9)
        far = rng.random(count) < 0.20
        vals[far] = rng.uniform(120.0, 200.0, size=int(far.sum()))
        return np.minimum(vals, 200.0)

    n_corner, n_hard_only, n_mold_only, n_dist_only = _defect_mode_counts(n_defective)
    start = n_normal
    for count, mode in (
        (n_corner, "corner"),
        (n_hard_only, "hardness"),
        (n_mold_only, "mold"),
        (n_dist_only, "distance"),
    ):
        sl = slice(start, start + count)
        start += count
        if count == 0:
            continue
        if mode == "corner":
            X[sl, c_mold] = high_mold(count)
            X[sl, c_hard] = high_hardness(count)
            X[sl, c_dist] = rng.uniform(2.0, DISTANCE_DEFECT_MAX, size=count)
        elif mode == "hardness":
            X[sl, c_mold] = rng.uniform(54.0, MOLD_THRESHOLD, size=count)
            X[sl, c_hard] = high_hardness(count)
            X[sl, c_dist] = rng.uniform(2.0, DISTANCE_NORMAL_MAX, size=count)
        elif mode == "mold":
            X[sl, c_mold] = high_mold(count)
            X[sl, c_hard] = rng.uniform(5.0, HARDNESS_THRESHOLD, size=count)
            X[sl, c_dist] = rng.uniform(2.0, DISTANCE_NORMAL_MAX, size=count)
        else:
            X[sl, c_mold] = rng.uniform(54.0, MOLD_THRESHOLD, size=count)
            X[sl, c_hard] = rng.uniform(5.0, HARDNESS_THRESHOLD, size=count)
            X[sl, c_dist] = high_distance(count)
    y[n_normal:] = 0.0

    # Pin the mold-temperature extrema to the schema bounds: the coldest
    # normal row and the hottest defective row.
    pinned = []
    if n_normal > 0:
        X[0, c_mold] = 54.0
        pinned.append((0, c_mold))
    if n_corner > 0:
        X[n_normal, c_mold] = 5343.0
        pinned.append((n_normal, c_mold))

    missing = rng.random(X.shape) < MISSING_CELL_RATE
    for i, j in pinned:
        missing[i, j] = False
    X[missing] = np.nan

    order = rng.permutation(n)
    return Dataset(schema, X[order], y[order])
