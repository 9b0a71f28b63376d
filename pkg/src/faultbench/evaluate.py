"""Scoring and comparison: stratified splits, ROC/AUC, per-model evaluation,
and the side-by-side comparison table.

Determinism contract: the canonical report renderings (text, CSV, JSON)
contain no wall-clock values. Training time appears only as a coarse
power-of-two band ("< 1 s", "< 2 s", ...); exact measured seconds and the
timestamp live in the separate metadata rendering, so identical runs produce
byte-identical reports.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import time
from dataclasses import dataclass

import numpy as np

from .classifiers import DISPLAY_NAMES, TrainConfig, predict_proba, train
from .dataset import Dataset
from .errors import ConfigError, DataError

SPLIT_KINDS = ("holdout", "kfold")
SORT_KEYS = ("input", "accuracy", "time", "auc")

# Reference bands from prior published comparisons of these algorithm
# families on similar manufacturing data; quoted in report footers as
# context, never asserted against this run.
CONTEXT_ACCURACY_BAND = (79, 92)
CONTEXT_AUC_BAND = (0.92, 0.95)


@dataclass(frozen=True)
class SplitPlan:
    """Holdout (one stratified pair) or k-fold (k stratified pairs)."""

    kind: str = "holdout"
    test_fraction: float = 0.3
    k: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SPLIT_KINDS:
            raise ConfigError(f"split kind must be one of {SPLIT_KINDS}, got {self.kind!r}")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError(
                f"test_fraction must lie strictly in (0, 1), got {self.test_fraction}"
            )
        if self.k < 2:
            raise ConfigError(f"k must be at least 2, got {self.k}")

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "test_fraction": self.test_fraction,
            "k": self.k,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SplitPlan":
        if not isinstance(data, dict):
            raise ConfigError("split plan must be a JSON object")
        known = {"kind", "test_fraction", "k", "seed"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown split key {sorted(unknown)[0]!r}")
        return cls(
            kind=data.get("kind", "holdout"),
            test_fraction=float(data.get("test_fraction", 0.3)),
            k=int(data.get("k", 5)),
            seed=int(data.get("seed", 0)),
        )


def _class_indices(dataset: Dataset) -> list[np.ndarray]:
    if not dataset.is_labeled:
        raise DataError("splitting requires a fully labeled dataset")
    groups = [np.flatnonzero(dataset.y == c) for c in (0.0, 1.0)]
    if any(g.size == 0 for g in groups):
        raise DataError("splitting requires both classes to be present")
    return groups


def split(dataset: Dataset, plan: SplitPlan) -> list[tuple[Dataset, Dataset]]:
    """Seeded stratified (train, test) pairs covering the dataset."""
    groups = _class_indices(dataset)
    rng = np.random.default_rng(plan.seed)
    if plan.kind == "holdout":
        test_parts = []
        for g in groups:
            if g.size < 2:
                raise DataError("each class needs at least 2 records for a holdout")
            n_test = int(round(plan.test_fraction * g.size))
            n_test = min(max(n_test, 1), g.size - 1)
            shuffled = rng.permutation(g)
            test_parts.append(shuffled[:n_test])
        test_idx = np.sort(np.concatenate(test_parts))
        mask = np.zeros(dataset.n_records, dtype=bool)
        mask[test_idx] = True
        train_idx = np.flatnonzero(~mask)
        return [(dataset.subset(train_idx), dataset.subset(test_idx))]

    fold_members: list[list[np.ndarray]] = [[] for _ in range(plan.k)]
    for g in groups:
        if g.size < plan.k:
            raise DataError(
                f"a class has {g.size} records, fewer than k={plan.k} folds"
            )
        shuffled = rng.permutation(g)
        for pos, idx in enumerate(shuffled):
            fold_members[pos % plan.k].append(idx)
    pairs = []
    for fold in range(plan.k):
        test_idx = np.sort(np.array(fold_members[fold], dtype=np.intp))
        mask = np.zeros(dataset.n_records, dtype=bool)
        mask[test_idx] = True
        train_idx = np.flatnonzero(~mask)
        pairs.append((dataset.subset(train_idx), dataset.subset(test_idx)))
    return pairs


def roc_auc(scores, labels) -> float:
    """Area under the ROC curve with normal (label 1) as the positive class.

    Trapezoidal over all thresholds; equals the pairwise statistic
    P(score_normal > score_defective) + 0.5 * P(tie).
    """
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(labels, dtype=np.float64).ravel()
    if s.shape != y.shape:
        raise DataError("scores and labels differ in length")
    if np.isnan(s).any() or np.isnan(y).any():
        raise DataError("scores and labels must be complete")
    n_pos = int((y == 1.0).sum())
    n_neg = int(y.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise DataError("roc_auc needs both classes in the labels")
    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    y_sorted = y[order]
    area = 0.0
    tp = fp = 0
    i = 0
    n = s.size
    while i < n:
        j = i
        while j < n and s_sorted[j] == s_sorted[i]:
            j += 1
        tp_new = tp + int((y_sorted[i:j] == 1.0).sum())
        fp_new = fp + (j - i) - (tp_new - tp)
        area += (fp_new - fp) * (tp + tp_new) / 2.0
        tp, fp = tp_new, fp_new
        i = j
    return area / (n_pos * n_neg)


@dataclass(frozen=True)
class EvalResult:
    """One algorithm's scores. confusion is ((TP, FN), (FP, TN)) with normal
    as the positive class: rows are actual normal/defective, columns
    predicted normal/defective."""

    kind: str
    accuracy: float
    auc: float
    train_seconds: float
    unused_fields: int
    confusion: tuple[tuple[int, int], tuple[int, int]]

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "algorithm": DISPLAY_NAMES.get(self.kind, self.kind),
            "accuracy": self.accuracy,
            "auc": self.auc,
            "unused_fields": self.unused_fields,
            "confusion": [list(row) for row in self.confusion],
        }


def confusion_matrix(y_true, y_pred) -> tuple[tuple[int, int], tuple[int, int]]:
    t = np.asarray(y_true).ravel()
    p = np.asarray(y_pred).ravel()
    tp = int(((t == 1.0) & (p == 1.0)).sum())
    fn = int(((t == 1.0) & (p == 0.0)).sum())
    fp = int(((t == 0.0) & (p == 1.0)).sum())
    tn = int(((t == 0.0) & (p == 0.0)).sum())
    return ((tp, fn), (fp, tn))


def evaluate_model(
    kind: str,
    dataset: Dataset,
    config: TrainConfig | None = None,
    plan: SplitPlan | None = None,
) -> EvalResult:
    """Train on the split plan's train side(s) and score the test side(s).

    Holdout reports the single pair; k-fold pools the confusion counts
    (accuracy is exactly (TP+TN)/total over all folds), averages AUC, and
    sums training time. unused_fields comes from the first fold's model.
    """
    plan = plan if plan is not None else SplitPlan()
    pairs = split(dataset, plan)
    total = np.zeros((2, 2), dtype=np.int64)
    aucs = []
    seconds = 0.0
    unused = None
    for train_ds, test_ds in pairs:
        model = train(kind, train_ds, config)
        seconds += model.train_seconds
        if unused is None:
            unused = len(model.unused_fields)
        proba = predict_proba(model, test_ds.X)
        pred = (proba >= 0.5).astype(np.float64)
        total += np.array(confusion_matrix(test_ds.y, pred))
        aucs.append(roc_auc(proba, test_ds.y))
    accuracy = float((total[0, 0] + total[1, 1]) / total.sum())
    confusion = ((int(total[0, 0]), int(total[0, 1])),
                 (int(total[1, 0]), int(total[1, 1])))
    return EvalResult(
        kind=kind,
        accuracy=accuracy,
        auc=float(np.mean(aucs)),
        train_seconds=seconds,
        unused_fields=int(unused),
        confusion=confusion,
    )


@dataclass(frozen=True)
class ComparisonReport:
    """Ordered per-algorithm results plus the fingerprints that pin the run."""

    results: tuple[EvalResult, ...]
    dataset_fingerprint: str
    config_fingerprint: str
    timestamp: str


def dataset_fingerprint(dataset: Dataset) -> str:
    """Content hash of schema, predictor matrix, and labels."""
    digest = hashlib.sha256()
    digest.update(json.dumps(dataset.schema.to_json_dict(), sort_keys=True).encode())
    digest.update(str(dataset.X.shape).encode())
    digest.update(np.ascontiguousarray(dataset.X).tobytes())
    digest.update(np.ascontiguousarray(dataset.y).tobytes())
    return digest.hexdigest()


def _normalize_configs(kinds, configs) -> dict[str, TrainConfig]:
    if configs is None:
        configs = TrainConfig()
    if isinstance(configs, TrainConfig):
        return {kind: configs for kind in kinds}
    if isinstance(configs, dict):
        out = {}
        for kind in kinds:
            cfg = configs.get(kind, TrainConfig())
            if not isinstance(cfg, TrainConfig):
                raise ConfigError(f"config for {kind!r} is not a TrainConfig")
            out[kind] = cfg
        return out
    raise ConfigError("configs must be a TrainConfig or a dict of them")


def compare(kinds, dataset: Dataset, configs=None, plan: SplitPlan | None = None) -> ComparisonReport:
    """Evaluate each kind on the same dataset and split plan."""
    kinds = list(kinds)
    if not kinds:
        raise ConfigError("compare needs at least one algorithm kind")
    plan = plan if plan is not None else SplitPlan()
    per_kind = _normalize_configs(kinds, configs)
    results = tuple(evaluate_model(k, dataset, per_kind[k], plan) for k in kinds)
    config_doc = {
        "kinds": kinds,
        "train": {k: per_kind[k].to_json_dict() for k in kinds},
        "split": plan.to_json_dict(),
    }
    config_digest = hashlib.sha256(
        json.dumps(config_doc, sort_keys=True).encode()
    ).hexdigest()
    return ComparisonReport(
        results=results,
        dataset_fingerprint=dataset_fingerprint(dataset),
        config_fingerprint=config_digest,
        timestamp=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    )


def time_band(seconds: float) -> str:
    """Deterministic rendering of a training time: '< 1 s', '< 2 s', ..."""
    bound = 1
    while seconds >= bound:
        bound *= 2
    return f"< {bound} s"


def sorted_results(report: ComparisonReport, sort: str = "input") -> tuple[EvalResult, ...]:
    if sort not in SORT_KEYS:
        raise ConfigError(f"sort must be one of {SORT_KEYS}, got {sort!r}")
    if sort == "input":
        return report.results
    if sort == "accuracy":
        return tuple(sorted(report.results, key=lambda r: -r.accuracy))
    if sort == "auc":
        return tuple(sorted(report.results, key=lambda r: -r.auc))
    return tuple(sorted(report.results, key=lambda r: r.train_seconds))


HEADER = ("Algorithm", "Processing time", "Accuracy (%)", "Unused fields",
          "Area Under Curve")


def _table_rows(report: ComparisonReport, sort: str) -> list[tuple[str, ...]]:
    rows = [HEADER]
    for r in sorted_results(report, sort):
        rows.append(
            (
                DISPLAY_NAMES.get(r.kind, r.kind),
                time_band(r.train_seconds),
                f"{100.0 * r.accuracy:.1f}",
                str(r.unused_fields),
                f"{r.auc:.3f}",
            )
        )
    return rows


def _context_note() -> str:
    lo, hi = CONTEXT_ACCURACY_BAND
    alo, ahi = CONTEXT_AUC_BAND
    return (
        f"note: prior published comparisons of these algorithm families on "
        f"similar manufacturing data reported {lo}-{hi}% accuracy and AUC "
        f"{alo:.2f}-{ahi:.2f}; quoted as context only, not asserted for this run."
    )


def render_text(report: ComparisonReport, sort: str = "input") -> str:
    rows = _table_rows(report, sort)
    widths = [max(len(r[c]) for r in rows) for c in range(len(HEADER))]
    lines = [
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
        for row in rows
    ]
    lines.append("")
    lines.append(f"dataset sha256: {report.dataset_fingerprint}")
    lines.append(f"config sha256: {report.config_fingerprint}")
    lines.append(_context_note())
    return "\n".join(lines) + "\n"


def render_csv(report: ComparisonReport, sort: str = "input") -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in _table_rows(report, sort):
        writer.writerow(row)
    return buf.getvalue()


def render_json(report: ComparisonReport, sort: str = "input") -> str:
    doc = {
        "results": [
            dict(r.to_json_dict(), processing_time=time_band(r.train_seconds))
            for r in sorted_results(report, sort)
        ],
        "dataset_sha256": report.dataset_fingerprint,
        "config_sha256": report.config_fingerprint,
        "context_note": _context_note(),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def render_meta_json(report: ComparisonReport) -> str:
    """Timestamp and exact training seconds; deliberately not byte-stable."""
    doc = {
        "timestamp": report.timestamp,
        "train_seconds": {r.kind: r.train_seconds for r in report.results},
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
