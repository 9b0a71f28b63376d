"""Binary decision trees: CART (gini) and a C5-style entropy tree with
gain-ratio splits and pessimistic pruning.

Threshold splits send value <= t to the left child, > t to the right. Split
candidates are midpoints between consecutive distinct sorted values, so
thresholds scale along with the data. Score ties break toward the lowest
field index, then the lowest threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from ..errors import DataError
from .base import BaseFaultClassifier, class_counts
from .criteria import entropy, gini_impurity

THRESHOLD = "threshold"
CATEGORIES = "categories"


@dataclass(frozen=True)
class TreeNode:
    """One tree node; a leaf when field is None.

    counts is (defective, normal) for the training records routed here.
    Threshold nodes hold two children (<= threshold, > threshold); category
    nodes hold one child per group of category values.
    """

    counts: tuple[int, int]
    field: int | None = None
    split_kind: str | None = None
    threshold: float | None = None
    groups: tuple[tuple[float, ...], ...] | None = None
    children: tuple["TreeNode", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return self.field is None

    @property
    def n_records(self) -> int:
        return self.counts[0] + self.counts[1]

    @property
    def proba_normal(self) -> float:
        return self.counts[1] / self.n_records

    @property
    def majority(self) -> float:
        """Majority class; a tie goes to normal, matching the 0.5 threshold."""
        return 1.0 if self.counts[1] >= self.counts[0] else 0.0

    def route(self, value: float) -> int:
        """Child index for a predictor value at this (non-leaf) node.

        A category value seen in no group falls back to the largest child.
        """
        if self.split_kind == THRESHOLD:
            return 0 if value <= self.threshold else 1
        for i, group in enumerate(self.groups):
            if value in group:
                return i
        return max(range(len(self.children)), key=lambda i: self.children[i].n_records)

    def to_json_dict(self) -> dict:
        doc = {"counts": list(self.counts)}
        if not self.is_leaf:
            doc["field"] = self.field
            doc["split_kind"] = self.split_kind
            if self.split_kind == THRESHOLD:
                doc["threshold"] = self.threshold
            else:
                doc["groups"] = [list(g) for g in self.groups]
            doc["children"] = [c.to_json_dict() for c in self.children]
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "TreeNode":
        counts = (int(doc["counts"][0]), int(doc["counts"][1]))
        if "field" not in doc:
            return cls(counts)
        groups = doc.get("groups")
        return cls(
            counts,
            field=int(doc["field"]),
            split_kind=doc["split_kind"],
            threshold=doc.get("threshold"),
            groups=tuple(tuple(float(v) for v in g) for g in groups) if groups else None,
            children=tuple(cls.from_json_dict(c) for c in doc["children"]),
        )


def route_to_leaf(root: TreeNode, row: np.ndarray) -> TreeNode:
    node = root
    while not node.is_leaf:
        node = node.children[node.route(row[node.field])]
    return node


def tree_proba(root: TreeNode, X: np.ndarray) -> np.ndarray:
    return np.array([route_to_leaf(root, row).proba_normal for row in X])


def split_fields(root: TreeNode) -> set[int]:
    """All predictor indices appearing in any split of the tree."""
    if root.is_leaf:
        return set()
    used = {root.field}
    for child in root.children:
        used |= split_fields(child)
    return used


def count_leaves(root: TreeNode) -> int:
    if root.is_leaf:
        return 1
    return sum(count_leaves(c) for c in root.children)


def render_tree(root: TreeNode, field_names) -> str:
    """Indented text rendering of a tree, thresholds at 3 decimals."""
    lines = []

    def fmt_value(v: float) -> str:
        return f"{v:g}"

    def walk(node: TreeNode, indent: int, prefix: str):
        pad = "  " * indent
        if node.is_leaf:
            label = "normal" if node.majority == 1.0 else "defective"
            lines.append(
                f"{pad}{prefix}-> {label} "
                f"(normal {node.counts[1]}, defective {node.counts[0]})"
            )
            return
        name = field_names[node.field]
        if node.split_kind == THRESHOLD:
            branches = [f"{name} <= {node.threshold:.3f}", f"{name} > {node.threshold:.3f}"]
        else:
            branches = [
                f"{name} in {{{', '.join(fmt_value(v) for v in g)}}}" for g in node.groups
            ]
        for text, child in zip(branches, node.children):
            lines.append(f"{pad}{prefix}{text}")
            walk(child, indent + 1, "")

    walk(root, 0, "")
    return "\n".join(lines) + "\n"


@dataclass
class _Split:
    score: float
    field: int
    threshold: float | None = None
    groups: tuple[tuple[float, ...], ...] | None = None
    # per-child boolean masks over the node's records
    masks: tuple = ()


def _threshold_candidates(x: np.ndarray, y: np.ndarray, min_leaf: int):
    """Sorted values plus the candidate positions where a split is legal.

    Returns (xs sorted, left defective/normal counts per cut, valid mask);
    cut i separates xs[:i+1] from xs[i+1:].
    """
    order = np.argsort(x, kind="stable")
    xs = x[order]
    ys = y[order]
    n = xs.size
    left_norm = np.cumsum(ys == 1.0)[:-1]
    left_n = np.arange(1, n)
    left_def = left_n - left_norm
    valid = xs[:-1] < xs[1:]
    valid &= (left_n >= min_leaf) & ((n - left_n) >= min_leaf)
    return xs, left_def.astype(np.float64), left_norm.astype(np.float64), valid


def _gini_vec(d: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Gini impurity for vectors of (defective, normal) counts."""
    n = d + m
    with np.errstate(invalid="ignore", divide="ignore"):
        g = 1.0 - (d * d + m * m) / (n * n)
    return np.where(n > 0, g, 0.0)


def _entropy_vec(d: np.ndarray, m: np.ndarray) -> np.ndarray:
    n = d + m
    with np.errstate(invalid="ignore", divide="ignore"):
        pd = np.where(d > 0, d / n, 1.0)
        pm = np.where(m > 0, m / n, 1.0)
        h = -(np.where(d > 0, d / n * np.log2(pd), 0.0)
              + np.where(m > 0, m / n * np.log2(pm), 0.0))
    return np.where(n > 0, h, 0.0)


def _best_threshold_split(x, y, j, min_leaf, criterion) -> _Split | None:
    """Best legal threshold cut on field j under 'gini' or 'gain_ratio'."""
    xs, left_def, left_norm, valid = _threshold_candidates(x, y, min_leaf)
    if not valid.any():
        return None
    n = xs.size
    total_def, total_norm = class_counts(y)
    right_def = total_def - left_def
    right_norm = total_norm - left_norm
    left_n = left_def + left_norm
    right_n = n - left_n

    if criterion == "gini":
        parent = gini_impurity((total_def, total_norm))
        weighted = (left_n * _gini_vec(left_def, left_norm)
                    + right_n * _gini_vec(right_def, right_norm)) / n
        score = parent - weighted
    else:
        parent = entropy((total_def, total_norm))
        weighted = (left_n * _entropy_vec(left_def, left_norm)
                    + right_n * _entropy_vec(right_def, right_norm)) / n
        gain = parent - weighted
        pl = left_n / n
        split_info = -(pl * np.log2(pl) + (1 - pl) * np.log2(1 - pl))
        # Gate weak cuts: only gains at or above the mean positive gain
        # compete, then gain ratio decides (avoids favoring tiny splinters).
        gain = np.where(valid, gain, -np.inf)
        positive = gain > 1e-12
        if not positive.any():
            return None
        mean_gain = gain[positive].mean()
        eligible = positive & (gain >= mean_gain - 1e-12)
        score = np.where(eligible, gain / split_info, -np.inf)

    score = np.where(valid, score, -np.inf)
    best = int(np.argmax(score))
    if not np.isfinite(score[best]) or score[best] <= 1e-12:
        return None
    threshold = (xs[best] + xs[best + 1]) / 2.0
    mask_left = x <= threshold
    return _Split(float(score[best]), j, threshold=float(threshold),
                  masks=(mask_left, ~mask_left))


def _best_category_split(x, y, j, min_leaf, criterion) -> _Split | None:
    """Best one-level-versus-rest partition of a set field."""
    levels = np.unique(x)
    if levels.size < 2:
        return None
    n = x.size
    total_def, total_norm = class_counts(y)
    parent = gini_impurity((total_def, total_norm)) if criterion == "gini" else entropy(
        (total_def, total_norm)
    )
    best = None
    for level in levels:
        mask = x == level
        n_in = int(mask.sum())
        if n_in < min_leaf or n - n_in < min_leaf:
            continue
        in_counts = class_counts(y[mask])
        out_counts = (total_def - in_counts[0], total_norm - in_counts[1])
        if criterion == "gini":
            weighted = (n_in * gini_impurity(in_counts)
                        + (n - n_in) * gini_impurity(out_counts)) / n
            score = parent - weighted
        else:
            weighted = (n_in * entropy(in_counts)
                        + (n - n_in) * entropy(out_counts)) / n
            gain = parent - weighted
            p = n_in / n
            split_info = -(p * np.log2(p) + (1 - p) * np.log2(1 - p))
            score = gain / split_info
        if score > 1e-12 and (best is None or score > best.score):
            rest = tuple(float(v) for v in levels if v != level)
            best = _Split(
                float(score), j,
                groups=((float(level),), rest),
                masks=(mask, ~mask),
            )
    return best


def grow_binary_tree(X, y, set_fields, criterion, max_depth, min_leaf) -> TreeNode:
    """Greedy recursive partitioning shared by CART and C5."""
    set_fields = frozenset(set_fields)

    def build(rows: np.ndarray, depth: int) -> TreeNode:
        yy = y[rows]
        counts = class_counts(yy)
        if (
            counts[0] == 0
            or counts[1] == 0
            or depth >= max_depth
            or rows.size < 2 * min_leaf
        ):
            return TreeNode(counts)
        best = None
        for j in range(X.shape[1]):
            xj = X[rows, j]
            if j in set_fields:
                cand = _best_category_split(xj, yy, j, min_leaf, criterion)
            else:
                cand = _best_threshold_split(xj, yy, j, min_leaf, criterion)
            if cand is not None and (best is None or cand.score > best.score):
                best = cand
        if best is None:
            return TreeNode(counts)
        children = tuple(build(rows[m], depth + 1) for m in best.masks)
        if best.threshold is not None:
            return TreeNode(counts, field=best.field, split_kind=THRESHOLD,
                            threshold=best.threshold, children=children)
        return TreeNode(counts, field=best.field, split_kind=CATEGORIES,
                        groups=best.groups, children=children)

    return build(np.arange(X.shape[0]), 0)


def pessimistic_error(n: int, errors: int, confidence: float) -> float:
    """Upper confidence bound on the error count of a leaf covering n records.

    Exact binomial upper confidence limit U on the error rate, defined by
    P(X <= errors | n, U) = confidence, scaled back to a count. Small pure
    leaves get a deliberately harsh bound (n=1, errors=0, confidence 0.25
    gives 0.75), which is what lets pruning collapse noise-chasing splits.
    """
    if n == 0:
        return 0.0
    if errors >= n:
        return float(n)
    upper = 1.0 - float(special.betaincinv(n - errors, errors + 1, confidence))
    return n * upper


def prune_pessimistic(root: TreeNode, confidence: float) -> TreeNode:
    """Collapse subtrees whose leaf-error bound is no worse than their own."""

    def estimate(node: TreeNode) -> tuple[TreeNode, float]:
        errors_as_leaf = node.n_records - max(node.counts)
        leaf_bound = pessimistic_error(node.n_records, errors_as_leaf, confidence)
        if node.is_leaf:
            return node, leaf_bound
        pruned_children = []
        subtree_bound = 0.0
        for child in node.children:
            pc, bound = estimate(child)
            pruned_children.append(pc)
            subtree_bound += bound
        if leaf_bound <= subtree_bound:
            return TreeNode(node.counts), leaf_bound
        kept = TreeNode(
            node.counts,
            field=node.field,
            split_kind=node.split_kind,
            threshold=node.threshold,
            groups=node.groups,
            children=tuple(pruned_children),
        )
        return kept, subtree_bound

    pruned, _ = estimate(root)
    return pruned


class _TreeClassifier(BaseFaultClassifier):
    """Common predict/serialize plumbing for the binary tree learners."""

    _criterion = "gini"

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


class CartClassifier(_TreeClassifier):
    """Binary classification tree grown by gini-impurity decrease.

    No cost-complexity pruning; depth and leaf-size caps bound the tree.
    """

    _criterion = "gini"

    def __init__(self, max_depth: int = 8, min_leaf: int = 5, set_fields: tuple = ()):
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.set_fields = set_fields

    def _fit(self, X, y):
        self.tree_ = grow_binary_tree(
            X, y, self.set_fields, self._criterion, self.max_depth, self.min_leaf
        )


class C5Classifier(_TreeClassifier):
    """Entropy tree with gain-ratio splits and pessimistic pruning."""

    _criterion = "gain_ratio"

    def __init__(
        self,
        max_depth: int = 8,
        min_leaf: int = 5,
        prune_confidence: float = 0.25,
        set_fields: tuple = (),
    ):
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.prune_confidence = prune_confidence
        self.set_fields = set_fields

    def _fit(self, X, y):
        if not 0.0 < self.prune_confidence < 0.5:
            raise DataError(
                f"prune_confidence must lie in (0, 0.5), got {self.prune_confidence}"
            )
        tree = grow_binary_tree(
            X, y, self.set_fields, self._criterion, self.max_depth, self.min_leaf
        )
        self.tree_ = prune_pessimistic(tree, self.prune_confidence)
