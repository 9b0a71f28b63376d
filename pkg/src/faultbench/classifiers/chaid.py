"""CHAID: multiway splits chosen by Bonferroni-adjusted chi-square tests
after merging statistically indistinguishable categories.

Range fields are discretized into equal-frequency bins at fit time (bin
edges are kept so rules can be exported in original units) and treated as
ordinal: only adjacent bins may merge. Set fields are nominal: any pair may
merge. The Bonferroni multiplier counts the ways c ordered (or unordered)
categories can collapse into r groups.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DataError
from ..preprocess import assign_bins, discretize
from .base import BaseFaultClassifier, class_counts
from .criteria import chi_square, chi_square_pvalue
from .trees import CATEGORIES, TreeNode, split_fields, tree_proba


def bonferroni_multiplier(c: int, r: int, ordinal: bool) -> float:
    """Number of ways to reduce c categories to r groups (Kass adjustment)."""
    if ordinal:
        return float(math.comb(c - 1, r - 1))
    total = 0.0
    for i in range(r):
        total += (-1.0) ** i * (r - i) ** c / (math.factorial(i) * math.factorial(r - i))
    return total


def _group_class_table(cats, y, groups) -> np.ndarray:
    table = np.zeros((len(groups), 2), dtype=np.float64)
    for g, group in enumerate(groups):
        mask = np.isin(cats, group)
        d, n = class_counts(y[mask])
        table[g, 0] = d
        table[g, 1] = n
    return table


def _pair_pvalue(table_a, table_b) -> float:
    """p-value for independence of two group rows; degenerate tables merge."""
    table = np.vstack([table_a, table_b])
    if (table.sum(axis=0) == 0).any() or (table.sum(axis=1) == 0).any():
        return 1.0
    stat, dof = chi_square(table)
    return chi_square_pvalue(stat, dof)


def merge_categories(cats, y, levels, alpha: float, ordinal: bool):
    """Kass-style merging: fuse the most similar pair while its p > alpha.

    Returns the final groups (tuples of level values). Ordinal fields only
    merge adjacent groups; nominal fields may merge any pair.
    """
    groups = [(float(v),) for v in levels]
    rows = [_group_class_table(cats, y, [g])[0] for g in groups]
    while len(groups) > 1:
        if ordinal:
            pairs = [(i, i + 1) for i in range(len(groups) - 1)]
        else:
            pairs = [(i, j) for i in range(len(groups)) for j in range(i + 1, len(groups))]
        pvals = [_pair_pvalue(rows[i], rows[j]) for i, j in pairs]
        best = int(np.argmax(pvals))
        if pvals[best] <= alpha:
            break
        i, j = pairs[best]
        groups[i] = tuple(sorted(groups[i] + groups[j]))
        rows[i] = rows[i] + rows[j]
        del groups[j], rows[j]
    return groups


class ChaidClassifier(BaseFaultClassifier):
    """Chi-square automatic interaction detection over binned predictors."""

    def __init__(
        self,
        alpha: float = 0.05,
        bins: int = 5,
        max_depth: int = 8,
        min_leaf: int = 5,
        set_fields: tuple = (),
    ):
        self.alpha = alpha
        self.bins = bins
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.set_fields = set_fields

    def _fit(self, X, y):
        if not 0.0 < self.alpha < 1.0:
            raise DataError(f"alpha must lie in (0, 1), got {self.alpha}")
        set_fields = frozenset(self.set_fields)
        n, p = X.shape
        cats = np.empty_like(X)
        self.bin_edges_ = {}
        for j in range(p):
            if j in set_fields:
                cats[:, j] = X[:, j]
            else:
                edges, assigned = discretize(X[:, j], self.bins)
                self.bin_edges_[j] = edges
                cats[:, j] = assigned

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
            best = None  # (adjusted p, field, groups)
            for j in range(p):
                cj = cats[rows, j]
                levels = np.unique(cj)
                if levels.size < 2:
                    continue
                ordinal = j not in set_fields
                groups = merge_categories(cj, yy, levels, self.alpha, ordinal)
                if len(groups) < 2:
                    continue
                table = _group_class_table(cj, yy, groups)
                if (table.sum(axis=1) < self.min_leaf).any():
                    continue
                stat, dof = chi_square(table)
                adjusted = min(
                    1.0,
                    chi_square_pvalue(stat, dof)
                    * bonferroni_multiplier(int(levels.size), len(groups), ordinal),
                )
                if best is None or adjusted < best[0] - 1e-15:
                    best = (adjusted, j, groups)
            if best is None or best[0] > self.alpha:
                return TreeNode(counts)
            _, j, groups = best
            children = []
            for group in groups:
                mask = np.isin(cats[rows, j], group)
                children.append(build(rows[mask], depth + 1))
            return TreeNode(
                counts,
                field=j,
                split_kind=CATEGORIES,
                groups=tuple(tuple(g) for g in groups),
                children=tuple(children),
            )

        self.tree_ = build(np.arange(n), 0)

    def _categorize(self, X) -> np.ndarray:
        cats = np.empty_like(X)
        for j in range(X.shape[1]):
            edges = self.bin_edges_.get(j)
            cats[:, j] = X[:, j] if edges is None else assign_bins(X[:, j], edges)
        return cats

    def _proba(self, X):
        return tree_proba(self.tree_, self._categorize(X))

    def _used_fields(self):
        return tuple(sorted(split_fields(self.tree_)))

    def _to_json_dict(self) -> dict:
        if self.constant_class_ is not None:
            return {"constant_class": self.constant_class_}
        return {
            "tree": self.tree_.to_json_dict(),
            "bin_edges": {str(j): list(e) for j, e in self.bin_edges_.items()},
        }

    def _restore_state(self, state: dict, n_features: int) -> None:
        self.n_features_in_ = n_features
        self.warning_ = None
        self.constant_class_ = state.get("constant_class")
        if self.constant_class_ is None:
            self.tree_ = TreeNode.from_json_dict(state["tree"])
            self.bin_edges_ = {
                int(j): tuple(float(v) for v in e)
                for j, e in state["bin_edges"].items()
            }
        else:
            self.warning_ = "single-class training set; model predicts a constant"
        self.fitted_ = True
