"""QUEST-style tree: the split field is chosen by statistical tests (ANOVA F
for range fields, chi-square for set fields), decoupled from the split-point
search, which fits a two-class quadratic discriminant on the winning field.

Set fields are split by mapping each level to its normal-class rate and
thresholding that coordinate, which partitions the levels into two groups.
"""

from __future__ import annotations

import math

import numpy as np

from .base import BaseFaultClassifier, class_counts
from .criteria import anova_f, anova_f_pvalue, chi_square, chi_square_pvalue
from .trees import CATEGORIES, THRESHOLD, TreeNode, split_fields, tree_proba

_VAR_FLOOR = 1e-12


def qda_split_point(x0: np.ndarray, x1: np.ndarray) -> float | None:
    """Boundary between two one-dimensional gaussian classes.

    Fits a normal density to each class (prior-weighted) and returns the
    equal-density point between the class means; when the quadratic has no
    usable root there, falls back to the midpoint of the means. None when
    the means coincide, meaning the field cannot separate the node.
    """
    m0, m1 = float(x0.mean()), float(x1.mean())
    if m0 == m1:
        return None
    v0 = max(float(x0.var()), _VAR_FLOOR)
    v1 = max(float(x1.var()), _VAR_FLOOR)
    n = x0.size + x1.size
    midpoint = (m0 + m1) / 2.0
    # Equal log-density: (x-m0)^2/(2 v0) - (x-m1)^2/(2 v1) = c
    c = math.log((x0.size / n) / (x1.size / n)) + 0.5 * math.log(v1 / v0)
    a = 1.0 / (2.0 * v0) - 1.0 / (2.0 * v1)
    b = m1 / v1 - m0 / v0
    const = m0 * m0 / (2.0 * v0) - m1 * m1 / (2.0 * v1) - c
    lo, hi = min(m0, m1), max(m0, m1)
    if abs(a) < 1e-18:
        if abs(b) < 1e-18:
            return midpoint
        root = -const / b
        return root if lo < root < hi else midpoint
    disc = b * b - 4.0 * a * const
    if disc < 0.0:
        return midpoint
    sq = math.sqrt(disc)
    roots = [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)]
    inside = [r for r in roots if lo < r < hi]
    if not inside:
        return midpoint
    return min(inside, key=lambda r: abs(r - midpoint))


class QuestClassifier(BaseFaultClassifier):
    """Quick unbiased tree with test-based field selection and QDA splits."""

    def __init__(self, max_depth: int = 8, min_leaf: int = 5, set_fields: tuple = ()):
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.set_fields = set_fields

    def _fit(self, X, y):
        set_fields = frozenset(self.set_fields)
        n, p = X.shape

        def field_pvalue(xj: np.ndarray, yy: np.ndarray, is_set: bool) -> float:
            if is_set:
                levels = np.unique(xj)
                if levels.size < 2:
                    return 1.0
                table = np.array(
                    [class_counts(yy[xj == level]) for level in levels], dtype=np.float64
                )
                if (table.sum(axis=0) == 0).any():
                    return 1.0
                stat, dof = chi_square(table)
                return chi_square_pvalue(stat, dof)
            if np.unique(xj).size < 2:
                return 1.0
            return anova_f_pvalue(*anova_f(xj, yy))

        def split_node(rows: np.ndarray, j: int, yy: np.ndarray):
            """(split kind, threshold or groups, left mask) or None."""
            xj = X[rows, j]
            if j in set_fields:
                levels = np.unique(xj)
                rates = {
                    float(v): float((yy[xj == v] == 1.0).mean()) for v in levels
                }
                coords = np.array([rates[float(v)] for v in xj])
                t = qda_split_point(coords[yy == 0.0], coords[yy == 1.0])
                if t is None:
                    return None
                left_levels = tuple(sorted(v for v in rates if rates[v] <= t))
                right_levels = tuple(sorted(v for v in rates if rates[v] > t))
                if not left_levels or not right_levels:
                    return None
                mask = np.isin(xj, left_levels)
                return CATEGORIES, (left_levels, right_levels), mask
            t = qda_split_point(xj[yy == 0.0], xj[yy == 1.0])
            if t is None:
                return None
            mask = xj <= t
            return THRESHOLD, float(t), mask

        def build(rows: np.ndarray, depth: int) -> TreeNode:
            yy = y[rows]
            counts = class_counts(yy)
            if (
                counts[0] == 0
                or counts[1] == 0
                or depth >= self.max_depth
                or rows.size < 2 * self.min_leaf
            ):
                return TreeNode(counts)
            pvals = [
                field_pvalue(X[rows, j], yy, j in set_fields) for j in range(p)
            ]
            order = sorted(range(p), key=lambda j: (pvals[j], j))
            for j in order:
                if pvals[j] >= 1.0:
                    break
                split = split_node(rows, j, yy)
                if split is None:
                    continue
                kind, payload, mask = split
                n_left = int(mask.sum())
                if n_left < self.min_leaf or rows.size - n_left < self.min_leaf:
                    continue
                children = (build(rows[mask], depth + 1), build(rows[~mask], depth + 1))
                if kind == THRESHOLD:
                    return TreeNode(counts, field=j, split_kind=THRESHOLD,
                                    threshold=payload, children=children)
                return TreeNode(counts, field=j, split_kind=CATEGORIES,
                                groups=payload, children=children)
            return TreeNode(counts)

        self.tree_ = build(np.arange(n), 0)

    def _proba(self, X):
        return tree_proba(self.tree_, X)

    def _used_fields(self):
        return tuple(sorted(split_fields(self.tree_)))

    def _to_json_dict(self) -> dict:
        if self.constant_class_ is not None:
            return {"constant_class": self.constant_class_}
        return {"tree": self.tree_.to_json_dict()}

    def _restore_state(self, state: dict, n_features: int) -> None:
        self.n_features_in_ = n_features
        self.warning_ = None
        self.constant_class_ = state.get("constant_class")
        if self.constant_class_ is None:
            self.tree_ = TreeNode.from_json_dict(state["tree"])
        else:
            self.warning_ = "single-class training set; model predicts a constant"
        self.fitted_ = True
