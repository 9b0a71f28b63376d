"""End-to-end acceptance checks, one per shipping criterion.

Each test records exactly one PASS/FAIL line (printed in the terminal
summary) and then asserts, so a full run doubles as the release checklist.
"""

import csv
import io
import math
import time

import numpy as np

from faultbench.classifiers import (
    COMPARISON_KINDS,
    TREE_KINDS,
    TrainConfig,
    predict_label,
    train,
)
from faultbench.classifiers.criteria import chi_square, entropy, gini_impurity
from faultbench.classifiers.linear import loss_and_grad as logreg_loss_and_grad
from faultbench.classifiers.mlp import loss_and_grad as mlp_loss_and_grad
from faultbench.classifiers.svm import SmoSvmClassifier
from faultbench.dataset import generate_reference
from faultbench.evaluate import (
    HEADER,
    SplitPlan,
    compare,
    evaluate_model,
    render_csv,
    render_json,
    render_text,
    roc_auc,
)
from faultbench.faultgen import InjectionSpec, inject_faults
from faultbench.outliers import OutlierMethod, detect_outliers, iqr_fences
from faultbench.preprocess import PreprocessPlan, Preprocessor, remove_constant_fields, standardize
from faultbench.rules import apply_rules, extract_rules

MOLD = "Mold temprature"
HARDNESS = "Hardness"


def test_criterion_01_rule_recovery(criterion, reference_split, train_config):
    start = time.perf_counter()
    train_ds, test_ds = reference_split
    model = train("c5", train_ds, train_config)
    ruleset = extract_rules(model, train_ds)
    hits = []
    for rule in ruleset.rules:
        if rule.outcome != 1.0:
            continue
        mold = [c.value for c in rule.conditions
                if c.field == MOLD and c.comparator == "<="]
        hard = [c.value for c in rule.conditions
                if c.field == HARDNESS and c.comparator == "<="]
        if mold and hard:
            hits.append((mold[0], hard[0]))
    recovered = [
        (m, h) for m, h in hits
        if abs(m - 325.5) <= 0.05 * 325.5 and abs(h - 82.0) <= 0.05 * 82.0
    ]
    correct = sum(
        predict_label(model, test_ds.X[i]) == test_ds.y[i]
        for i in range(test_ds.n_records)
    )
    accuracy = correct / test_ds.n_records
    elapsed = time.perf_counter() - start
    ok = bool(recovered) and accuracy >= 0.95 and elapsed < 10.0
    detail = (
        f"c5 normal-rule thresholds {recovered or hits}, "
        f"test accuracy {accuracy:.3f}, {elapsed:.2f}s"
    )
    criterion(1, ok, detail)


def test_criterion_02_injection_arithmetic(criterion):
    start = time.perf_counter()
    base = generate_reference(1000, 0.0, seed=11)
    injected, indices = inject_faults(base, InjectionSpec(fraction=0.10, seed=5))
    n_defective = int((injected.y == 0.0).sum())
    elapsed = time.perf_counter() - start
    ok = len(indices) == 100 and n_defective == 100 and elapsed < 1.0
    criterion(2, ok, f"fraction 0.10 of n=1000 injected {n_defective} "
                     f"defective records, {elapsed:.2f}s")


def test_criterion_03_comparison_table(criterion, reference_clean, train_config):
    start = time.perf_counter()
    plan = SplitPlan(seed=0)
    report = compare(COMPARISON_KINDS, reference_clean, configs=train_config,
                     plan=plan)
    rows = list(csv.reader(io.StringIO(render_csv(report))))
    columns_ok = rows[0] == list(HEADER) and len(rows) == 8
    accuracies = {r.kind: r.accuracy for r in report.results}
    accuracies["c5"] = evaluate_model(
        "c5", reference_clean, config=train_config, plan=plan
    ).accuracy
    floor_ok = all(accuracies[k] >= 0.75 for k in COMPARISON_KINDS)
    trees = [accuracies[k] for k in ("cart", "quest", "c5")]
    flats = [accuracies[k] for k in ("nbayes", "logreg")]
    ranking_ok = min(trees) >= max(flats)
    elapsed = time.perf_counter() - start
    ok = columns_ok and floor_ok and ranking_ok and elapsed < 60.0
    detail = (
        f"7-kind table columns ok={columns_ok}, min accuracy "
        f"{min(accuracies[k] for k in COMPARISON_KINDS):.3f}, trees "
        f">= flats {ranking_ok} (min tree {min(trees):.3f}, max flat "
        f"{max(flats):.3f}), {elapsed:.1f}s"
    )
    criterion(3, ok, detail)


def _gini_brute(counts):
    total = sum(counts)
    differ = 0.0
    for i, a in enumerate(counts):
        for j, b in enumerate(counts):
            if i != j:
                differ += (a / total) * (b / total)
    return differ


def _entropy_brute(counts):
    total = sum(counts)
    bits = 0.0
    for c in counts:
        if c:
            bits -= (c / total) * math.log2(c / total)
    return bits


def _chi_square_brute(table):
    rows, cols = table.shape
    total = table.sum()
    stat = 0.0
    for i in range(rows):
        for j in range(cols):
            expected = table[i].sum() * table[:, j].sum() / total
            stat += (table[i, j] - expected) ** 2 / expected
    return stat, (rows - 1) * (cols - 1)


def test_criterion_04_impurity_oracles(criterion):
    rng = np.random.default_rng(40)
    worst = 0.0
    for _ in range(100):
        k = int(rng.integers(2, 6))
        counts = tuple(int(v) for v in rng.integers(0, 30, size=k))
        if sum(counts) == 0:
            counts = (1,) + counts[1:]
        worst = max(worst, abs(gini_impurity(counts) - _gini_brute(counts)))
        worst = max(worst, abs(entropy(counts) - _entropy_brute(counts)))
    for _ in range(100):
        r, c = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        table = rng.integers(1, 30, size=(r, c)).astype(float)
        stat, dof = chi_square(table)
        want_stat, want_dof = _chi_square_brute(table)
        worst = max(worst, abs(stat - want_stat))
        worst = max(worst, abs(dof - want_dof))
    ok = worst <= 1e-10
    criterion(4, ok, f"gini/entropy/chi-square vs brute force on 100 random "
                     f"tables each, worst gap {worst:.2e}")


def _mann_whitney_auc(scores, labels):
    pos = scores[labels == 1.0]
    neg = scores[labels == 0.0]
    wins = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                wins += 1.0
            elif p == q:
                wins += 0.5
    return wins / (pos.size * neg.size)


def test_criterion_05_auc_oracle(criterion):
    rng = np.random.default_rng(50)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 201))
        scores = np.round(rng.normal(size=n), 1)  # rounding forces ties
        labels = (rng.random(n) < 0.5).astype(float)
        if len(set(labels)) < 2:
            labels[0] = 1.0 - labels[0]
        worst = max(worst, abs(roc_auc(scores, labels)
                               - _mann_whitney_auc(scores, labels)))
    invariant = True
    for _ in range(20):
        n = int(rng.integers(4, 60))
        scores = np.round(rng.normal(size=n), 1)
        labels = (rng.random(n) < 0.5).astype(float)
        if len(set(labels)) < 2:
            labels[0] = 1.0 - labels[0]
        base = roc_auc(scores, labels)
        _, ranks = np.unique(scores, return_inverse=True)
        invariant &= roc_auc(scores * 2.0 + 8.0, labels) == base
        invariant &= roc_auc(ranks.astype(float), labels) == base
    ok = worst <= 1e-12 and invariant
    criterion(5, ok, f"trapezoid vs Mann-Whitney on 100 instances, worst gap "
                     f"{worst:.2e}; monotone invariance on 20 instances "
                     f"{'held' if invariant else 'broke'}")


def _central_difference(fun, params, step=1e-5):
    grad = np.empty_like(params)
    for i in range(params.size):
        up = params.copy()
        up[i] += step
        down = params.copy()
        down[i] -= step
        grad[i] = (fun(up) - fun(down)) / (2 * step)
    return grad


def _worst_relative_error(analytic, numeric):
    scale = np.maximum(np.abs(numeric), 1e-8)
    return float(np.max(np.abs(analytic - numeric) / scale))


def test_criterion_06_gradient_checks(criterion):
    rng = np.random.default_rng(60)
    worst = 0.0
    for _ in range(10):
        n, p = int(rng.integers(4, 12)), int(rng.integers(1, 5))
        X = rng.normal(size=(n, p))
        y = (rng.random(n) < 0.5).astype(float)
        params = rng.normal(scale=0.8, size=p + 1)
        l2 = float(rng.uniform(0.0, 0.1))
        _, grad = logreg_loss_and_grad(params, X, y, l2)
        numeric = _central_difference(
            lambda q: logreg_loss_and_grad(q, X, y, l2)[0], params
        )
        worst = max(worst, _worst_relative_error(grad, numeric))
    for _ in range(10):
        n, p, h = (int(rng.integers(3, 9)), int(rng.integers(1, 4)),
                   int(rng.integers(2, 5)))
        X = rng.normal(size=(n, p))
        y = (rng.random(n) < 0.5).astype(float)
        params = rng.uniform(-0.5, 0.5, size=p * h + h + h + 1)
        _, grad = mlp_loss_and_grad(params, X, y, p, h)
        numeric = _central_difference(
            lambda q: mlp_loss_and_grad(q, X, y, p, h)[0], params
        )
        worst = max(worst, _worst_relative_error(grad, numeric))
    ok = worst <= 1e-5
    criterion(6, ok, f"logreg+mlp analytic vs central-difference gradients on "
                     f"10 instances each, worst relative error {worst:.2e}")


def test_criterion_07_svm_optimality(criterion):
    worst_kkt = 0.0
    worst_acc = 1.0
    for seed in range(5):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(15, 35))
        X0 = rng.normal([-2.0, 0.0], 0.4, size=(n, 2))
        X1 = rng.normal([2.0, 0.0], 0.4, size=(n, 2))
        X = np.vstack([X0, X1])
        y = np.array([0.0] * n + [1.0] * n)
        est = SmoSvmClassifier(kernel="linear", C=1.0, tol=1e-3)
        est.fit(X, y)
        worst_kkt = max(worst_kkt, float(est.kkt_violations().max()))
        worst_acc = min(worst_acc, float((est.predict(X) == y).mean()))
    ok = worst_kkt <= 1e-3 and worst_acc == 1.0
    criterion(7, ok, f"SMO on 5 separable toys: worst KKT violation "
                     f"{worst_kkt:.2e}, worst training accuracy {worst_acc:.3f}")


def test_criterion_08_rule_tree_equivalence(criterion, reference_clean,
                                            train_config):
    complete = ~np.isnan(reference_clean.X).any(axis=1)
    mismatches = 0
    compared = 0
    for kind in TREE_KINDS:
        model = train(kind, reference_clean, train_config)
        ruleset = extract_rules(model, reference_clean)
        for i in np.flatnonzero(complete):
            row = reference_clean.X[i]
            label, _ = apply_rules(ruleset, row)
            mismatches += label != predict_label(model, row)
            compared += 1
    ok = mismatches == 0 and compared > 0
    criterion(8, ok, f"rules vs tree predictions on {compared} "
                     f"(record, kind) pairs across {len(TREE_KINDS)} tree "
                     f"kinds: {mismatches} mismatches")


def _pipeline_reports():
    raw = generate_reference(1000, 0.10, seed=7)
    clean = Preprocessor(PreprocessPlan()).fit_transform(raw)
    injected, _ = inject_faults(clean, InjectionSpec(fraction=0.05, seed=0))
    report = compare(COMPARISON_KINDS, injected, configs=TrainConfig(seed=13),
                     plan=SplitPlan(seed=0))
    return (render_text(report).encode(), render_csv(report).encode(),
            render_json(report).encode())


def test_criterion_09_determinism(criterion):
    first = _pipeline_reports()
    second = _pipeline_reports()
    same = [a == b for a, b in zip(first, second)]
    ok = all(same)
    criterion(9, ok, f"full compare pipeline run twice: text/csv/json reports "
                     f"byte-identical {same}")


def test_criterion_10_preprocessing_contracts(criterion, reference_split):
    method = OutlierMethod("iqr", 1.5)
    cases = [
        (np.array([10.0, 11.0, 12.0, 13.0, 5000.0]), {4}, (8.0, 16.0)),
        (np.array([1.0, 2.0, 3.0, 4.0, 100.0]), {4}, (-1.0, 7.0)),
        (np.array([0.0] * 4 + [10.0] * 4 + [100.0]), {8}, (-15.0, 25.0)),
    ]
    fences_ok = all(
        detect_outliers(values, method) == flagged
        and iqr_fences(values, 1.5) == fences
        for values, flagged, fences in cases
    )
    train_ds, _ = reference_split
    once, removed = remove_constant_fields(train_ds)
    twice, removed_again = remove_constant_fields(once)
    idempotent = removed_again == [] and twice.schema == once.schema
    standardized, _ = standardize(once)
    worst_mean = 0.0
    worst_sd = 0.0
    for j in standardized.schema.range_predictor_indices():
        col = standardized.X[:, j]
        worst_mean = max(worst_mean, abs(float(col.mean())))
        worst_sd = max(worst_sd, abs(float(col.std(ddof=1)) - 1.0))
    moments_ok = worst_mean < 1e-9 and worst_sd < 1e-9
    ok = fences_ok and idempotent and moments_ok
    criterion(10, ok, f"hand-checked fences on 3 vectors {fences_ok}, "
                      f"constant-field removal idempotent {idempotent}, "
                      f"standardized |mean| {worst_mean:.1e} and |sd-1| "
                      f"{worst_sd:.1e}")
