"""Typed column descriptions for tabular sensor datasets.

A schema is an ordered list of fields. Range fields carry numeric bounds,
set fields carry an explicit list of admissible levels. Exactly one field
is the binary efficiency label (1 = normal part, 0 = defective part).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import DataError

RANGE = "range"
SET = "set"
PREDICTOR = "predictor"
LABEL = "label"


@dataclass(frozen=True)
class FieldSpec:
    """One column: either a bounded real (range) or a discrete set of levels."""

    name: str
    kind: str
    min: float | None = None
    max: float | None = None
    levels: tuple[float, ...] = ()
    role: str = PREDICTOR

    def __post_init__(self):
        if self.kind not in (RANGE, SET):
            raise DataError(f"field {self.name!r}: kind must be 'range' or 'set'")
        if self.role not in (PREDICTOR, LABEL):
            raise DataError(f"field {self.name!r}: role must be 'predictor' or 'label'")
        if self.kind == RANGE:
            if self.min is None or self.max is None:
                raise DataError(f"range field {self.name!r} needs min and max")
            if not self.min < self.max:
                raise DataError(f"range field {self.name!r}: min must be < max")
            if self.levels:
                raise DataError(f"range field {self.name!r} must not define levels")
        else:
            if not self.levels:
                raise DataError(f"set field {self.name!r} needs at least one level")
            if self.min is not None or self.max is not None:
                raise DataError(f"set field {self.name!r} must not define min/max")
            object.__setattr__(self, "levels", tuple(float(v) for v in self.levels))

    @property
    def is_range(self) -> bool:
        return self.kind == RANGE

    def contains(self, value: float) -> bool:
        """Whether a non-missing value is admissible for this field."""
        if self.kind == RANGE:
            return self.min <= value <= self.max
        return value in self.levels


@dataclass(frozen=True)
class Schema:
    """Ordered field list with exactly one binary set-kind label."""

    fields: tuple[FieldSpec, ...]
    name: str = "unnamed"

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple(self.fields))
        names = [f.name for f in self.fields]
        if len(set(names)) != len(names):
            dup = next(n for n in names if names.count(n) > 1)
            raise DataError(f"duplicate field name {dup!r} in schema")
        labels = [f for f in self.fields if f.role == LABEL]
        if len(labels) != 1:
            raise DataError("schema must declare exactly one label field")
        lab = labels[0]
        if lab.kind != SET or set(lab.levels) != {0.0, 1.0}:
            raise DataError("label field must be set-kind with levels {0, 1}")

    @property
    def label_field(self) -> FieldSpec:
        return next(f for f in self.fields if f.role == LABEL)

    @property
    def predictors(self) -> tuple[FieldSpec, ...]:
        return tuple(f for f in self.fields if f.role == PREDICTOR)

    @property
    def predictor_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.predictors)

    @property
    def n_predictors(self) -> int:
        return len(self.predictors)

    def predictor_index(self, name: str) -> int:
        try:
            return self.predictor_names.index(name)
        except ValueError:
            raise DataError(f"unknown predictor {name!r}") from None

    def set_predictor_indices(self) -> tuple[int, ...]:
        """Indices (in predictor order) of the discrete-valued predictors."""
        return tuple(i for i, f in enumerate(self.predictors) if f.kind == SET)

    def range_predictor_indices(self) -> tuple[int, ...]:
        """Indices (in predictor order) of the continuous predictors."""
        return tuple(i for i, f in enumerate(self.predictors) if f.kind == RANGE)

    def without(self, names) -> "Schema":
        """A copy of the schema with the given predictor fields removed."""
        drop = set(names)
        missing = drop - {f.name for f in self.fields}
        if missing:
            raise DataError(f"cannot drop unknown fields {sorted(missing)}")
        if self.label_field.name in drop:
            raise DataError("the label field cannot be removed")
        return Schema(tuple(f for f in self.fields if f.name not in drop), self.name)

    def to_json_dict(self) -> dict:
        fields = []
        for f in self.fields:
            entry = {"name": f.name, "kind": f.kind, "role": f.role}
            if f.kind == RANGE:
                entry["min"] = f.min
                entry["max"] = f.max
            else:
                entry["levels"] = list(f.levels)
            fields.append(entry)
        return {"name": self.name, "fields": fields}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "Schema":
        try:
            fields = tuple(
                FieldSpec(
                    name=entry["name"],
                    kind=entry["kind"],
                    min=entry.get("min"),
                    max=entry.get("max"),
                    levels=tuple(entry.get("levels", ())),
                    role=entry.get("role", PREDICTOR),
                )
                for entry in doc["fields"]
            )
        except (KeyError, TypeError) as exc:
            raise DataError(f"malformed schema document: {exc}") from exc
        return cls(fields, doc.get("name", "unnamed"))


def save_schema(schema: Schema, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(schema.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_schema(path) -> Schema:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read schema file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"schema file {path} is not valid JSON: {exc}") from exc
    return Schema.from_json_dict(doc)


# Bundled engine-bracket sensor schema. Field spellings are preserved exactly
# as they appear in the source logging system ("Mold temprature", "Prevet the
# black pieces"); canonical spellings are noted in the README.
def reference_schema() -> Schema:
    return Schema(
        fields=(
            FieldSpec("Mold temprature", RANGE, 54.0, 5343.0),
            FieldSpec("Melting temprature", RANGE, 65.0, 2000.0),
            FieldSpec("Hardness", RANGE, 5.0, 700.0),
            FieldSpec("Machining", RANGE, 0.010, 756.0),
            FieldSpec("Prevet the black pieces", SET, levels=(0.0, 1.0)),
            FieldSpec(
                "Distance between sensitive points and umbilical", RANGE, 2.0, 200.0
            ),
            FieldSpec("Preventing damage", RANGE, 0.0, 1.0),
            FieldSpec("Efficiency", SET, levels=(0.0, 1.0), role=LABEL),
        ),
        name="engine_bracket",
    )
