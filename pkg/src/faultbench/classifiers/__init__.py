"""Eight classifiers behind one train/predict contract.

train() dispatches on the kind string, times the fit, and wraps the result
in an immutable TrainedModel. Probabilities everywhere are P(part is
normal); label 1 is normal, 0 defective.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, fields, replace

import numpy as np

from .._validation import check_matrix, check_n_features, check_probability
from ..dataset import Dataset
from ..errors import ConfigError, DataError, TrainingError
from ..schema import Schema
from .base import BaseFaultClassifier
from .chaid import ChaidClassifier
from .criteria import chi_square, entropy, gini_impurity
from .linear import LogisticRegressionClassifier
from .mlp import MlpClassifier
from .nbayes import NBayesClassifier
from .quest import QuestClassifier
from .svm import SmoSvmClassifier
from .trees import C5Classifier, CartClassifier, TreeNode, render_tree

KINDS = ("chaid", "cart", "quest", "c5", "nbayes", "logreg", "svm", "mlp")

# The seven-row comparison lineup (C5 is used for rule extraction).
COMPARISON_KINDS = ("chaid", "mlp", "cart", "quest", "nbayes", "logreg", "svm")

DISPLAY_NAMES = {
    "chaid": "CHAID",
    "mlp": "Neural net",
    "cart": "C&R Tree",
    "quest": "QUEST",
    "nbayes": "Bayesian Network",
    "logreg": "Logistic regression",
    "svm": "SVM",
    "c5": "C5",
}

TREE_KINDS = ("chaid", "cart", "quest", "c5")

MODEL_FORMAT = "faultbench-model"
MODEL_VERSION = 1

_ESTIMATOR_CLASSES = {
    "chaid": ChaidClassifier,
    "cart": CartClassifier,
    "quest": QuestClassifier,
    "c5": C5Classifier,
    "nbayes": NBayesClassifier,
    "logreg": LogisticRegressionClassifier,
    "svm": SmoSvmClassifier,
    "mlp": MlpClassifier,
}


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for every kind, with stable documented defaults."""

    max_depth: int = 8
    min_leaf: int = 5
    chaid_alpha: float = 0.05
    bins: int = 5
    logreg_learning_rate: float = 0.5
    logreg_max_iter: int = 20000
    logreg_l2: float = 1e-4
    svm_c: float = 1.0
    svm_kernel: str = "rbf"
    svm_gamma: float | None = None
    svm_tol: float = 1e-3
    mlp_hidden_units: int = 8
    mlp_epochs: int = 400
    mlp_learning_rate: float = 0.5
    mlp_batch_size: int = 32
    seed: int = 0

    def __post_init__(self):
        for name in ("max_depth", "min_leaf", "bins", "logreg_max_iter",
                     "mlp_hidden_units", "mlp_epochs", "mlp_batch_size"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1")
        for name in ("chaid_alpha", "logreg_learning_rate", "svm_c", "svm_tol",
                     "mlp_learning_rate"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")

    def to_json_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_json_dict(cls, data: dict) -> "TrainConfig":
        if not isinstance(data, dict):
            raise ConfigError("train config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown train config key {sorted(unknown)[0]!r}")
        return cls(**data)

    def with_seed(self, seed: int) -> "TrainConfig":
        return replace(self, seed=seed)


@dataclass(frozen=True)
class TrainedModel:
    """A fitted classifier plus the metadata the reports need."""

    kind: str
    schema: Schema
    estimator: BaseFaultClassifier
    used_fields: frozenset[str]
    train_seconds: float
    warning: str | None = None

    @property
    def unused_fields(self) -> frozenset[str]:
        return frozenset(self.schema.predictor_names) - self.used_fields


def make_estimator(kind: str, config: TrainConfig, set_fields) -> BaseFaultClassifier:
    set_fields = tuple(int(j) for j in set_fields)
    if kind == "chaid":
        return ChaidClassifier(
            alpha=config.chaid_alpha, bins=config.bins, max_depth=config.max_depth,
            min_leaf=config.min_leaf, set_fields=set_fields,
        )
    if kind == "cart":
        return CartClassifier(
            max_depth=config.max_depth, min_leaf=config.min_leaf, set_fields=set_fields
        )
    if kind == "quest":
        return QuestClassifier(
            max_depth=config.max_depth, min_leaf=config.min_leaf, set_fields=set_fields
        )
    if kind == "c5":
        return C5Classifier(
            max_depth=config.max_depth, min_leaf=config.min_leaf, set_fields=set_fields
        )
    if kind == "nbayes":
        return NBayesClassifier(bins=config.bins, set_fields=set_fields)
    if kind == "logreg":
        return LogisticRegressionClassifier(
            learning_rate=config.logreg_learning_rate,
            max_iter=config.logreg_max_iter,
            l2=config.logreg_l2,
        )
    if kind == "svm":
        return SmoSvmClassifier(
            C=config.svm_c, kernel=config.svm_kernel, gamma=config.svm_gamma,
            tol=config.svm_tol, seed=config.seed,
        )
    if kind == "mlp":
        return MlpClassifier(
            hidden_units=config.mlp_hidden_units, epochs=config.mlp_epochs,
            learning_rate=config.mlp_learning_rate,
            batch_size=config.mlp_batch_size, seed=config.seed,
        )
    raise ConfigError(f"unknown classifier kind {kind!r}; expected one of {KINDS}")


def train(kind: str, dataset: Dataset, config: TrainConfig | None = None) -> TrainedModel:
    """Fit one classifier kind on a labeled, imputed dataset."""
    if kind not in KINDS:
        raise ConfigError(f"unknown classifier kind {kind!r}; expected one of {KINDS}")
    if config is None:
        config = TrainConfig()
    if not dataset.is_labeled:
        raise DataError("training requires a fully labeled dataset")
    if np.isnan(dataset.X).any():
        raise DataError(
            "training data contains missing values; run preprocessing first"
        )
    estimator = make_estimator(kind, config, dataset.schema.set_predictor_indices())
    start = time.perf_counter()
    try:
        estimator.fit(dataset.X, dataset.y)
    except (ConfigError, DataError):
        raise
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        raise TrainingError(f"{kind} training failed: {exc}") from exc
    seconds = time.perf_counter() - start
    names = dataset.schema.predictor_names
    used = frozenset(names[j] for j in estimator.used_field_indices())
    return TrainedModel(kind, dataset.schema, estimator, used, seconds,
                        estimator.warning_)


def _as_matrix(model: TrainedModel, record) -> tuple[np.ndarray, bool]:
    arr = np.asarray(record, dtype=np.float64)
    single = arr.ndim == 1
    X = check_matrix(arr, name="record")
    check_n_features(X, model.schema.n_predictors, name="record")
    return X, single


def predict_proba(model: TrainedModel, record):
    """P(part is normal) for one record (1-D) or a matrix of records."""
    X, single = _as_matrix(model, record)
    proba = model.estimator.predict_proba(X)
    return float(proba[0]) if single else proba


def predict_label(model: TrainedModel, record, threshold: float = 0.5):
    """1 (normal) when P(normal) >= threshold, else 0; ties go to normal."""
    threshold = check_probability(threshold)
    proba = predict_proba(model, record)
    if isinstance(proba, float):
        return 1.0 if proba >= threshold else 0.0
    return (proba >= threshold).astype(np.float64)


def render_model_tree(model: TrainedModel) -> str:
    """Indented text rendering of a fitted tree model."""
    if model.kind not in TREE_KINDS:
        raise DataError(f"{model.kind} is not a tree model")
    est = model.estimator
    if est.constant_class_ is not None:
        label = "normal" if est.constant_class_ == 1.0 else "defective"
        return f"-> {label} (constant model)\n"
    return render_tree(est.tree_, model.schema.predictor_names)


def save_model(model: TrainedModel, path) -> None:
    """Write the model as versioned JSON. Training time is not stored, so
    identical runs produce identical files."""
    params = {}
    for key, value in model.estimator.get_params().items():
        params[key] = list(value) if isinstance(value, tuple) else value
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "kind": model.kind,
        "schema": model.schema.to_json_dict(),
        "used_fields": sorted(model.used_fields),
        "warning": model.warning,
        "params": params,
        "state": model.estimator._to_json_dict(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> TrainedModel:
    """Rebuild a TrainedModel from save_model output.

    The wall-clock training time is not serialized; loaded models report
    train_seconds = 0.0.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read model file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"model file {path} is not valid JSON: {exc}") from exc
    if doc.get("format") != MODEL_FORMAT:
        raise DataError(f"{path} is not a model file")
    if doc.get("version") != MODEL_VERSION:
        raise DataError(f"unsupported model version {doc.get('version')!r}")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise DataError(f"model file has unknown kind {kind!r}")
    schema = Schema.from_json_dict(doc["schema"])
    params = dict(doc.get("params", {}))
    if "set_fields" in params and params["set_fields"] is not None:
        params["set_fields"] = tuple(params["set_fields"])
    estimator = _ESTIMATOR_CLASSES[kind](**params)
    estimator._restore_state(doc["state"], schema.n_predictors)
    estimator.warning_ = doc.get("warning")
    return TrainedModel(
        kind=kind,
        schema=schema,
        estimator=estimator,
        used_fields=frozenset(doc.get("used_fields", [])),
        train_seconds=0.0,
        warning=doc.get("warning"),
    )


__all__ = [
    "COMPARISON_KINDS",
    "C5Classifier",
    "CartClassifier",
    "ChaidClassifier",
    "DISPLAY_NAMES",
    "KINDS",
    "LogisticRegressionClassifier",
    "MlpClassifier",
    "NBayesClassifier",
    "QuestClassifier",
    "SmoSvmClassifier",
    "TREE_KINDS",
    "TrainConfig",
    "TrainedModel",
    "TreeNode",
    "chi_square",
    "entropy",
    "gini_impurity",
    "load_model",
    "make_estimator",
    "predict_label",
    "predict_proba",
    "render_model_tree",
    "render_tree",
    "save_model",
    "train",
]
