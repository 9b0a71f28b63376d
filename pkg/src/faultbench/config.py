"""Run configuration: one serializable document that pins an entire run.

A run is a pure function of (RunConfig, input files). The global seed fills
in for any sub-section whose JSON omitted its own seed, so one flag can
reseed a whole run without touching explicitly pinned seeds.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .classifiers import KINDS, TrainConfig
from .errors import ConfigError
from .evaluate import SplitPlan
from .faultgen import InjectionSpec
from .preprocess import PreprocessPlan

DATASET_SOURCES = ("reference", "file")


@dataclass(frozen=True)
class DatasetSource:
    """Either the built-in reference generator or a delimited file + schema."""

    kind: str = "reference"
    n: int = 1000
    defect_fraction: float = 0.10
    seed: int = 7
    path: str | None = None
    schema_path: str | None = None

    def __post_init__(self):
        if self.kind not in DATASET_SOURCES:
            raise ConfigError(
                f"dataset.kind must be one of {DATASET_SOURCES}, got {self.kind!r}"
            )
        if self.kind == "file":
            if not self.path:
                raise ConfigError("dataset.path is required when dataset.kind is 'file'")
            if not self.schema_path:
                raise ConfigError(
                    "dataset.schema_path is required when dataset.kind is 'file'"
                )

    def to_json_dict(self) -> dict:
        if self.kind == "file":
            return {"kind": "file", "path": self.path, "schema_path": self.schema_path}
        return {
            "kind": "reference",
            "n": self.n,
            "defect_fraction": self.defect_fraction,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, data: dict, default_seed: int = 7) -> "DatasetSource":
        if not isinstance(data, dict):
            raise ConfigError("dataset must be a JSON object")
        known = {"kind", "n", "defect_fraction", "seed", "path", "schema_path"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown key 'dataset.{sorted(unknown)[0]}'")
        return cls(
            kind=data.get("kind", "reference"),
            n=int(data.get("n", 1000)),
            defect_fraction=float(data.get("defect_fraction", 0.10)),
            seed=int(data.get("seed", default_seed)),
            path=data.get("path"),
            schema_path=data.get("schema_path"),
        )


@dataclass(frozen=True)
class RunConfig:
    dataset: DatasetSource
    preprocess: PreprocessPlan
    inject: InjectionSpec | None
    algorithms: tuple[str, ...]
    train: TrainConfig
    train_overrides: dict[str, TrainConfig]
    split: SplitPlan
    out_dir: str
    seed: int

    def __post_init__(self):
        if not self.algorithms:
            raise ConfigError("algorithms must name at least one classifier kind")
        for kind in self.algorithms:
            if kind not in KINDS:
                raise ConfigError(
                    f"unknown algorithm {kind!r}; valid kinds are {KINDS}"
                )
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ConfigError("algorithms lists a kind twice")
        for kind in self.train_overrides:
            if kind not in KINDS:
                raise ConfigError(f"unknown key 'train_overrides.{kind}'")

    def train_config_for(self, kind: str) -> TrainConfig:
        return self.train_overrides.get(kind, self.train)

    def to_json_dict(self) -> dict:
        doc = {
            "dataset": self.dataset.to_json_dict(),
            "preprocess": self.preprocess.to_json_dict(),
            "inject": None if self.inject is None else self.inject.to_json_dict(),
            "algorithms": list(self.algorithms),
            "train": self.train.to_json_dict(),
            "split": self.split.to_json_dict(),
            "out_dir": self.out_dir,
            "seed": self.seed,
        }
        if self.train_overrides:
            doc["train_overrides"] = {
                k: v.to_json_dict() for k, v in sorted(self.train_overrides.items())
            }
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigError("run config must be a JSON object")
        known = {
            "dataset", "preprocess", "inject", "algorithms", "train",
            "train_overrides", "split", "out_dir", "seed",
        }
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown key {sorted(unknown)[0]!r}")
        seed = doc.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ConfigError("'seed' must be an integer")

        def section(name, parser, default_doc, *, seeded=False):
            raw = doc.get(name, default_doc)
            if raw is None:
                return None
            if seeded and isinstance(raw, dict) and "seed" not in raw:
                raw = dict(raw, seed=seed)
            try:
                return parser(raw)
            except ConfigError as exc:
                raise ConfigError(f"{name}: {exc}") from exc

        dataset = section(
            "dataset", lambda d: DatasetSource.from_json_dict(d, default_seed=seed), {}
        )
        preprocess = section("preprocess", PreprocessPlan.from_json_dict, {})
        inject = section("inject", InjectionSpec.from_json_dict, None, seeded=True)
        train = section("train", TrainConfig.from_json_dict, {}, seeded=True)
        split = section("split", SplitPlan.from_json_dict, {}, seeded=True)

        algorithms = doc.get("algorithms", [])
        if not isinstance(algorithms, (list, tuple)):
            raise ConfigError("'algorithms' must be a list of kind names")

        overrides_doc = doc.get("train_overrides", {})
        if not isinstance(overrides_doc, dict):
            raise ConfigError("'train_overrides' must map kind names to train configs")
        overrides = {}
        for kind, sub in overrides_doc.items():
            merged = dict(train.to_json_dict())
            if not isinstance(sub, dict):
                raise ConfigError(f"train_overrides.{kind}: must be a JSON object")
            merged.update(sub)
            try:
                overrides[kind] = TrainConfig.from_json_dict(merged)
            except ConfigError as exc:
                raise ConfigError(f"train_overrides.{kind}: {exc}") from exc

        out_dir = doc.get("out_dir", "runs/reference")
        if not isinstance(out_dir, str) or not out_dir:
            raise ConfigError("'out_dir' must be a non-empty string")

        return cls(
            dataset=dataset,
            preprocess=preprocess,
            inject=inject,
            algorithms=tuple(algorithms),
            train=train,
            train_overrides=overrides,
            split=split,
            out_dir=out_dir,
            seed=seed,
        )

    def fingerprint(self) -> str:
        canonical = json.dumps(self.to_json_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()


def default_config_doc() -> dict:
    """The out-of-the-box run: generated reference data, all comparison
    kinds, a light extra fault injection, one stratified holdout."""
    return {
        "dataset": {"kind": "reference", "n": 1000, "defect_fraction": 0.10, "seed": 7},
        "preprocess": {},
        "inject": {"fraction": 0.05, "mode": "rule_region"},
        "algorithms": ["chaid", "mlp", "cart", "quest", "nbayes", "logreg", "svm"],
        "train": {},
        "split": {},
        "out_dir": "runs/reference",
        "seed": 0,
    }


def default_run_config() -> RunConfig:
    return RunConfig.from_json_dict(default_config_doc())


def load_run_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return RunConfig.from_json_dict(doc)


def save_run_config(config: RunConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
