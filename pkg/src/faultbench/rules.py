"""Turn fitted trees into conjunctive prediction rules and apply them as a
standalone classifier.

Every leaf becomes one rule: the conjunction of the conditions along its
root-to-leaf path, with the leaf's majority class as the outcome. Range
fields produce <=/> conditions (CHAID's bin groups are translated back to
original units through the stored bin edges); set fields produce = conditions,
and a branch covering several levels is expanded into one rule per level.
Rules are evaluated first-match-wins with a dataset-majority default.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .classifiers import TREE_KINDS, TrainedModel
from .classifiers.trees import CATEGORIES, THRESHOLD, TreeNode
from .dataset import Dataset
from .errors import DataError
from .schema import SET, Schema

COMPARATORS = ("<=", ">", "=")


@dataclass(frozen=True)
class Condition:
    """One atomic test: field <= value, field > value, or field = value."""

    field: str
    comparator: str
    value: float

    def __post_init__(self):
        if self.comparator not in COMPARATORS:
            raise DataError(
                f"comparator must be one of {COMPARATORS}, got {self.comparator!r}"
            )

    def holds(self, value: float) -> bool:
        if np.isnan(value):
            raise DataError(
                f"record has a missing value in field {self.field!r}; "
                "impute before applying rules"
            )
        if self.comparator == "<=":
            return value <= self.value
        if self.comparator == ">":
            return value > self.value
        return value == self.value

    def render(self) -> str:
        if self.comparator == "=":
            return f"{self.field} = {self.value:g}"
        return f"{self.field} {self.comparator} {self.value:.3f}"


@dataclass(frozen=True)
class Rule:
    """A conjunction of conditions and the class it predicts."""

    conditions: tuple[Condition, ...]
    outcome: float
    support: int
    confidence: float

    def matches(self, record: np.ndarray, schema: Schema) -> bool:
        return all(
            c.holds(float(record[schema.predictor_index(c.field)]))
            for c in self.conditions
        )

    def render(self) -> str:
        if self.conditions:
            body = " and ".join(c.render() for c in self.conditions)
        else:
            body = "always"
        label = "normal" if self.outcome == 1.0 else "defective"
        return f"{body} then the part is {label}"


@dataclass(frozen=True)
class RuleSet:
    """Ordered rules with first-match-wins semantics and a default class."""

    schema: Schema
    rules: tuple[Rule, ...]
    default_class: float

    def to_json_dict(self) -> dict:
        return {
            "format": "faultbench-rules",
            "version": 1,
            "schema": self.schema.to_json_dict(),
            "default_class": self.default_class,
            "rules": [
                {
                    "conditions": [
                        {"field": c.field, "comparator": c.comparator, "value": c.value}
                        for c in r.conditions
                    ],
                    "outcome": r.outcome,
                    "support": r.support,
                    "confidence": r.confidence,
                }
                for r in self.rules
            ],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "RuleSet":
        if doc.get("format") != "faultbench-rules":
            raise DataError("not a rules document")
        if doc.get("version") != 1:
            raise DataError(f"unsupported rules version {doc.get('version')!r}")
        rules = tuple(
            Rule(
                conditions=tuple(
                    Condition(c["field"], c["comparator"], float(c["value"]))
                    for c in r["conditions"]
                ),
                outcome=float(r["outcome"]),
                support=int(r["support"]),
                confidence=float(r["confidence"]),
            )
            for r in doc["rules"]
        )
        return cls(
            schema=Schema.from_json_dict(doc["schema"]),
            rules=rules,
            default_class=float(doc["default_class"]),
        )


def _merge_conditions(conditions) -> tuple[Condition, ...] | None:
    """Collapse same-field/same-comparator conditions to the tightest.

    Returns None when the conjunction is contradictory (empty range, or two
    different = values on one field).
    """
    upper: dict[str, float] = {}
    lower: dict[str, float] = {}
    equal: dict[str, float] = {}
    order: list[tuple[str, str]] = []

    def note(key):
        if key not in order:
            order.append(key)

    for c in conditions:
        if c.comparator == "<=":
            if c.field not in upper or c.value < upper[c.field]:
                upper[c.field] = c.value
            note((c.field, "<="))
        elif c.comparator == ">":
            if c.field not in lower or c.value > lower[c.field]:
                lower[c.field] = c.value
            note((c.field, ">"))
        else:
            if c.field in equal and equal[c.field] != c.value:
                return None
            equal[c.field] = c.value
            note((c.field, "="))
    for name in set(upper) & set(lower):
        if lower[name] >= upper[name]:
            return None
    merged = []
    for name, comparator in order:
        if comparator == "<=":
            merged.append(Condition(name, "<=", upper[name]))
        elif comparator == ">":
            merged.append(Condition(name, ">", lower[name]))
        else:
            merged.append(Condition(name, "=", equal[name]))
    return tuple(merged)


def _branch_conditions(node: TreeNode, child_index: int, schema: Schema,
                       bin_edges: dict) -> list[list[Condition]]:
    """Condition alternatives added by taking one branch of a split node.

    Returns a list of alternatives (each a condition list); branches over
    several set-field levels yield one alternative per level.
    """
    name = schema.predictors[node.field].name
    if node.split_kind == THRESHOLD:
        if child_index == 0:
            return [[Condition(name, "<=", float(node.threshold))]]
        return [[Condition(name, ">", float(node.threshold))]]
    group = node.groups[child_index]
    if schema.predictors[node.field].kind == SET:
        return [[Condition(name, "=", float(v))] for v in group]
    edges = bin_edges.get(node.field)
    if edges is None:
        raise DataError(f"no bin edges recorded for field {name!r}")
    bins = sorted(int(v) for v in group)
    if bins != list(range(bins[0], bins[-1] + 1)):
        raise DataError(f"non-contiguous bin group {bins} on field {name!r}")
    conds = []
    if bins[0] > 0:
        conds.append(Condition(name, ">", float(edges[bins[0] - 1])))
    if bins[-1] < len(edges):
        conds.append(Condition(name, "<=", float(edges[bins[-1]])))
    return [conds]


def _rule_support(conditions, dataset: Dataset, outcome: float) -> tuple[int, float]:
    mask = np.ones(dataset.n_records, dtype=bool)
    for c in conditions:
        col = dataset.X[:, dataset.schema.predictor_index(c.field)]
        with np.errstate(invalid="ignore"):
            if c.comparator == "<=":
                ok = col <= c.value
            elif c.comparator == ">":
                ok = col > c.value
            else:
                ok = col == c.value
        mask &= ok & ~np.isnan(col)
    support = int(mask.sum())
    if support == 0:
        return 0, 0.0
    agree = int((dataset.y[mask] == outcome).sum())
    return support, agree / support


def extract_rules(model: TrainedModel, dataset: Dataset) -> RuleSet:
    """One rule per leaf of a fitted tree, scored against the dataset."""
    if model.kind not in TREE_KINDS:
        raise DataError(f"cannot extract rules from a {model.kind} model")
    if dataset.schema != model.schema:
        raise DataError("dataset schema does not match the model schema")
    estimator = model.estimator
    bin_edges = getattr(estimator, "bin_edges_", {})
    labels = dataset.y[~np.isnan(dataset.y)]
    if labels.size == 0:
        raise DataError("rule extraction needs a labeled dataset")
    default = 1.0 if (labels == 1.0).sum() >= (labels == 0.0).sum() else 0.0

    rules: list[Rule] = []

    def emit(conditions, outcome: float):
        merged = _merge_conditions(conditions)
        if merged is None:
            return
        support, confidence = _rule_support(merged, dataset, outcome)
        rules.append(Rule(merged, outcome, support, confidence))

    def walk(node: TreeNode, alternatives: list[list[Condition]]):
        if node.is_leaf:
            for conds in alternatives:
                emit(conds, node.majority)
            return
        for i, child in enumerate(node.children):
            added = _branch_conditions(node, i, model.schema, bin_edges)
            walk(child, [base + extra for base in alternatives for extra in added])

    if estimator.constant_class_ is not None:
        constant = float(estimator.constant_class_)
        support, confidence = _rule_support((), dataset, constant)
        return RuleSet(model.schema, (Rule((), constant, support, confidence),),
                       default)
    walk(estimator.tree_, [[]])
    return RuleSet(model.schema, tuple(rules), default)


def simplify(ruleset: RuleSet) -> RuleSet:
    """Tighten conditions and drop contradictory or zero-support rules."""
    kept = []
    for rule in ruleset.rules:
        merged = _merge_conditions(rule.conditions)
        if merged is None or rule.support == 0:
            continue
        kept.append(Rule(merged, rule.outcome, rule.support, rule.confidence))
    return RuleSet(ruleset.schema, tuple(kept), ruleset.default_class)


def apply_rules(ruleset: RuleSet, record) -> tuple[float, int | None]:
    """Classify one record; returns (label, index of the rule that fired).

    The index is None when no rule fires and the default class is used. A
    missing value in a field an evaluated rule references is an error.
    """
    arr = np.asarray(record, dtype=np.float64).ravel()
    if arr.size != ruleset.schema.n_predictors:
        raise DataError(
            f"record has {arr.size} values, schema defines "
            f"{ruleset.schema.n_predictors} predictors"
        )
    for i, rule in enumerate(ruleset.rules):
        if rule.matches(arr, ruleset.schema):
            return rule.outcome, i
    return ruleset.default_class, None


def render_rules(ruleset: RuleSet) -> str:
    """Prose rendering, one numbered rule per line, plus the default."""
    lines = []
    for i, rule in enumerate(ruleset.rules, start=1):
        lines.append(
            f"Rule {i}: {rule.render()} "
            f"(support {rule.support}, confidence {rule.confidence:.3f})"
        )
    label = "normal" if ruleset.default_class == 1.0 else "defective"
    lines.append(f"Default: the part is {label}")
    return "\n".join(lines) + "\n"


def rules_to_json_text(ruleset: RuleSet) -> str:
    return json.dumps(ruleset.to_json_dict(), indent=2, sort_keys=True) + "\n"


def save_rules(ruleset: RuleSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(rules_to_json_text(ruleset))


def load_rules(path) -> RuleSet:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read rules file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"rules file {path} is not valid JSON: {exc}") from exc
    return RuleSet.from_json_dict(doc)
