"""faultbench: benchmark fault-detection classifiers on tabular sensor data.

The package covers the full pipeline: schema-aware datasets and profiling,
cleaning (outliers, imputation, constant fields), synthetic fault injection,
eight classifiers trained from first principles, rule extraction from trees,
and a side-by-side comparison report.

Probability convention, used everywhere: predictions are the probability
that a part is NORMAL. Label 1 means normal, label 0 means defective. This
is inverted from the common "positive = fault" convention.
"""

__version__ = "0.1.0"

from .classifiers import (
    COMPARISON_KINDS,
    KINDS,
    TREE_KINDS,
    TrainConfig,
    TrainedModel,
    load_model,
    predict_label,
    predict_proba,
    save_model,
    train,
)
from .config import RunConfig, default_run_config, load_run_config, save_run_config
from .dataset import Dataset, generate_reference, load_delimited, profile, save_delimited
from .errors import ConfigError, DataError, FaultbenchError, TrainingError
from .evaluate import (
    ComparisonReport,
    EvalResult,
    SplitPlan,
    compare,
    evaluate_model,
    render_csv,
    render_json,
    render_text,
    roc_auc,
    split,
)
from .faultgen import InjectionSpec, inject_faults
from .outliers import OutlierMethod, detect_outliers
from .preprocess import PreprocessPlan, Preprocessor
from .rules import RuleSet, apply_rules, extract_rules, load_rules, render_rules, save_rules
from .schema import FieldSpec, Schema, load_schema, reference_schema, save_schema

__all__ = [
    "COMPARISON_KINDS",
    "ComparisonReport",
    "ConfigError",
    "DataError",
    "Dataset",
    "EvalResult",
    "FaultbenchError",
    "FieldSpec",
    "InjectionSpec",
    "KINDS",
    "OutlierMethod",
    "PreprocessPlan",
    "Preprocessor",
    "RuleSet",
    "RunConfig",
    "Schema",
    "SplitPlan",
    "TREE_KINDS",
    "TrainConfig",
    "TrainedModel",
    "TrainingError",
    "__version__",
    "apply_rules",
    "compare",
    "default_run_config",
    "detect_outliers",
    "evaluate_model",
    "extract_rules",
    "generate_reference",
    "inject_faults",
    "load_delimited",
    "load_model",
    "load_run_config",
    "load_rules",
    "load_schema",
    "predict_label",
    "predict_proba",
    "profile",
    "reference_schema",
    "render_csv",
    "render_json",
    "render_rules",
    "render_text",
    "roc_auc",
    "save_delimited",
    "save_model",
    "save_run_config",
    "save_rules",
    "save_schema",
    "split",
    "train",
]
