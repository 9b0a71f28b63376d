"""Command-line pipeline driver.

Subcommands: generate | profile | inject | train | rules | compare.
Every subcommand accepts --config PATH, --seed N, --out DIR; flags win over
the config file. Exit codes: 0 ok, 1 usage or config error, 2 data error,
3 training failure.

All outputs land under the run directory in a fixed layout: profiles/,
data/, models/, rules/, reports/. Given the same config, inputs, and seed,
every file except reports/comparison.meta.json (the timestamp sidecar) is
byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .classifiers import (
    TREE_KINDS,
    render_model_tree,
    save_model,
    train as train_model,
)
from .config import RunConfig, default_config_doc, load_run_config
from .dataset import (
    Dataset,
    generate_reference,
    load_delimited,
    profile,
    profiles_to_json,
    render_profile_table,
    save_delimited,
)
from .errors import ConfigError, DataError, FaultbenchError, TrainingError
from .evaluate import (
    SORT_KEYS,
    compare,
    render_csv,
    render_json,
    render_meta_json,
    render_text,
)
from .faultgen import MODES, InjectionSpec, inject_faults
from .preprocess import Preprocessor
from .rules import extract_rules, render_rules, rules_to_json_text
from .schema import load_schema, reference_schema, save_schema


class _Parser(argparse.ArgumentParser):
    """argparse parser that reports usage problems as ConfigError (exit 1)."""

    def error(self, message):
        raise ConfigError(message)


def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run config")
    common.add_argument("--seed", type=int, metavar="N",
                        help="override the global seed")
    common.add_argument("--out", metavar="DIR", help="override the run directory")

    parser = _Parser(
        prog="faultbench",
        description="Benchmark fault-detection classifiers on sensor data.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("generate", parents=[common],
                       help="write the built-in reference dataset")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("profile", parents=[common],
                       help="write a field profile table")
    p.add_argument("--in", dest="in_path", metavar="PATH",
                   help="dataset file to profile (default: config dataset)")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("inject", parents=[common],
                       help="inject synthetic defective records")
    p.add_argument("--in", dest="in_path", metavar="PATH",
                   help="dataset file to inject into (default: config dataset)")
    p.add_argument("--fraction", type=float, metavar="F",
                   help="fraction of records to overwrite")
    p.add_argument("--mode", choices=MODES, help="injection mode")
    p.add_argument("--audit", metavar="PATH",
                   help="where to write the injection audit JSON")
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("train", parents=[common],
                       help="train the configured kinds on the prepared dataset")
    p.add_argument("--kinds", metavar="A,B,...",
                   help="comma-separated kinds (default: config algorithms)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("rules", parents=[common],
                       help="extract prediction rules from a tree model")
    p.add_argument("--kind", choices=TREE_KINDS,
                   help="tree kind (default: first tree kind in config)")
    p.set_defaults(func=cmd_rules)

    p = sub.add_parser("compare", parents=[common],
                       help="train every configured kind and emit the comparison table")
    p.add_argument("--sort", choices=SORT_KEYS, default="input",
                   help="row order of the report (default: input)")
    p.set_defaults(func=cmd_compare)

    return parser


def _resolve_config(args) -> RunConfig:
    if getattr(args, "config", None):
        doc = load_run_config(args.config).to_json_dict()
    else:
        doc = default_config_doc()
    if getattr(args, "seed", None) is not None:
        doc["seed"] = args.seed
        # let the new global seed cascade into sections that did not pin one
        for name in ("inject", "train", "split"):
            part = doc.get(name)
            if isinstance(part, dict):
                part.pop("seed", None)
    return RunConfig.from_json_dict(doc)


def _out_root(config: RunConfig, args) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    return Path(config.out_dir)


def _write_text(root: Path, rel: str, text: str) -> str:
    path = root / rel
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return str(path)


def _raw_dataset(config: RunConfig, in_path: str | None = None) -> Dataset:
    """The dataset before any preprocessing or injection."""
    if config.dataset.kind == "file":
        schema = load_schema(config.dataset.schema_path)
        return load_delimited(in_path or config.dataset.path, schema)
    if in_path:
        return load_delimited(in_path, reference_schema())
    src = config.dataset
    return generate_reference(src.n, src.defect_fraction, seed=src.seed)


def _prepared_dataset(config: RunConfig) -> tuple[Dataset, list[int]]:
    """Preprocess the raw dataset, then apply the configured injection."""
    raw = _raw_dataset(config)
    prepared = Preprocessor(config.preprocess).fit_transform(raw)
    if config.inject is None or config.inject.fraction == 0.0:
        return prepared, []
    return inject_faults(prepared, config.inject)


def cmd_generate(config: RunConfig, args, root: Path) -> list[str]:
    if config.dataset.kind != "reference":
        raise ConfigError("generate requires a reference dataset spec")
    dataset = _raw_dataset(config)
    written = []
    path = root / "data" / "reference.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    save_delimited(dataset, path)
    written.append(str(path))
    schema_path = root / "data" / "schema.json"
    save_schema(dataset.schema, schema_path)
    written.append(str(schema_path))
    return written


def cmd_profile(config: RunConfig, args, root: Path) -> list[str]:
    dataset = _raw_dataset(config, getattr(args, "in_path", None))
    profiles = profile(dataset, config.preprocess.outlier_method)
    profile_json = json.dumps(profiles_to_json(profiles), indent=2, sort_keys=True) + "\n"
    return [
        _write_text(root, "profiles/profile.txt", render_profile_table(profiles)),
        _write_text(root, "profiles/profile.json", profile_json),
    ]


def cmd_inject(config: RunConfig, args, root: Path) -> list[str]:
    base = config.inject.to_json_dict() if config.inject is not None else {}
    if getattr(args, "fraction", None) is not None:
        base["fraction"] = args.fraction
    if getattr(args, "mode", None):
        base["mode"] = args.mode
    base.setdefault("seed", config.seed)
    if "fraction" not in base:
        raise ConfigError("inject needs a fraction (config inject section or --fraction)")
    spec = InjectionSpec.from_json_dict(base)

    dataset = _raw_dataset(config, getattr(args, "in_path", None))
    injected, indices = inject_faults(dataset, spec)

    written = []
    out_path = root / "data" / "injected.csv"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_delimited(injected, out_path)
    written.append(str(out_path))

    audit_rel = getattr(args, "audit", None) or "data/injection_audit.json"
    audit = {
        "spec": spec.to_json_dict(),
        "n_records": injected.n_records,
        "n_injected": len(indices),
        "injected_indices": list(indices),
    }
    written.append(
        _write_text(root, audit_rel, json.dumps(audit, indent=2, sort_keys=True) + "\n")
    )
    return written


def _requested_kinds(config: RunConfig, args) -> tuple[str, ...]:
    raw = getattr(args, "kinds", None)
    if not raw:
        return config.algorithms
    kinds = tuple(k.strip() for k in raw.split(",") if k.strip())
    if not kinds:
        raise ConfigError("--kinds names no classifier kinds")
    return kinds


def cmd_train(config: RunConfig, args, root: Path) -> list[str]:
    kinds = _requested_kinds(config, args)
    dataset, _ = _prepared_dataset(config)
    written = []
    for kind in kinds:
        model = train_model(kind, dataset, config.train_config_for(kind))
        path = root / "models" / f"{kind}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        save_model(model, path)
        written.append(str(path))
        if kind in TREE_KINDS:
            written.append(
                _write_text(root, f"models/{kind}.txt", render_model_tree(model))
            )
    return written


def _rule_kind(config: RunConfig, args) -> str:
    explicit = getattr(args, "kind", None)
    if explicit:
        return explicit
    for kind in config.algorithms:
        if kind in TREE_KINDS:
            return kind
    raise ConfigError(
        "rule extraction needs a tree kind; none configured (use --kind)"
    )


def cmd_rules(config: RunConfig, args, root: Path) -> list[str]:
    kind = _rule_kind(config, args)
    dataset, _ = _prepared_dataset(config)
    model = train_model(kind, dataset, config.train_config_for(kind))
    ruleset = extract_rules(model, dataset)
    return [
        _write_text(root, f"rules/{kind}.txt", render_rules(ruleset)),
        _write_text(root, f"rules/{kind}.json", rules_to_json_text(ruleset)),
    ]


def cmd_compare(config: RunConfig, args, root: Path) -> list[str]:
    dataset, _ = _prepared_dataset(config)
    per_kind = {k: config.train_config_for(k) for k in config.algorithms}
    report = compare(config.algorithms, dataset, per_kind, config.split)
    sort = getattr(args, "sort", "input")

    written = [
        _write_text(root, "reports/comparison.txt", render_text(report, sort)),
        _write_text(root, "reports/comparison.csv", render_csv(report, sort)),
        _write_text(root, "reports/comparison.json", render_json(report, sort)),
        _write_text(root, "reports/comparison.meta.json", render_meta_json(report)),
    ]

    for kind in config.algorithms:
        model = train_model(kind, dataset, config.train_config_for(kind))
        path = root / "models" / f"{kind}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        save_model(model, path)
        written.append(str(path))

    tree_kind = next((k for k in config.algorithms if k in TREE_KINDS), None)
    if tree_kind is not None:
        model = train_model(tree_kind, dataset, config.train_config_for(tree_kind))
        ruleset = extract_rules(model, dataset)
        written.append(
            _write_text(root, f"rules/{tree_kind}.txt", render_rules(ruleset))
        )
        written.append(
            _write_text(root, f"rules/{tree_kind}.json", rules_to_json_text(ruleset))
        )
    return written


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            raise ConfigError("a subcommand is required (see faultbench --help)")
        config = _resolve_config(args)
        root = _out_root(config, args)
        for path in args.func(config, args, root):
            print(f"wrote {path}")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except TrainingError as exc:
        print(f"training error: {exc}", file=sys.stderr)
        return 3
    except FaultbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
