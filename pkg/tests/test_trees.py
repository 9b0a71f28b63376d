import numpy as np
import pytest

from faultbench.classifiers import (
    TrainConfig,
    load_model,
    predict_proba,
    render_model_tree,
    save_model,
    train,
)
from faultbench.classifiers.chaid import ChaidClassifier, bonferroni_multiplier, merge_categories
from faultbench.classifiers.nbayes import NBayesClassifier
from faultbench.classifiers.quest import QuestClassifier, qda_split_point
from faultbench.classifiers.trees import (
    C5Classifier,
    CartClassifier,
    count_leaves,
    grow_binary_tree,
    pessimistic_error,
    prune_pessimistic,
    split_fields,
)


def test_grow_binary_tree_hand_case():
    X = np.array([[1.0], [2.0], [3.0], [4.0]])
    y = np.array([1.0, 1.0, 0.0, 0.0])
    tree = grow_binary_tree(X, y, set_fields=(), criterion="gini", max_depth=3, min_leaf=1)
    assert tree.field == 0
    assert tree.threshold == pytest.approx(2.5)  # midpoint between 2 and 3
    left, right = tree.children
    assert left.is_leaf and left.proba_normal == 1.0
    assert right.is_leaf and right.proba_normal == 0.0


def test_tie_break_prefers_lowest_field_index():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    X = np.column_stack([x, x])  # identical columns: same best score
    y = np.array([1.0, 1.0, 0.0, 0.0])
    tree = grow_binary_tree(X, y, set_fields=(), criterion="gini", max_depth=1, min_leaf=1)
    assert tree.field == 0


def test_min_leaf_blocks_small_splits():
    X = np.array([[1.0], [2.0], [3.0], [4.0]])
    y = np.array([1.0, 1.0, 0.0, 0.0])
    tree = grow_binary_tree(X, y, set_fields=(), criterion="gini", max_depth=3, min_leaf=3)
    assert tree.is_leaf  # every cut would leave a side smaller than 3


def test_pure_node_stops():
    X = np.array([[1.0], [2.0], [3.0]])
    y = np.ones(3)
    tree = grow_binary_tree(X, y, set_fields=(), criterion="gini", max_depth=3, min_leaf=1)
    assert tree.is_leaf
    assert tree.majority == 1.0


def test_set_field_category_split():
    X = np.array([[0.0], [0.0], [1.0], [1.0], [0.0], [1.0]])
    y = np.array([1.0, 1.0, 0.0, 0.0, 1.0, 0.0])
    tree = grow_binary_tree(X, y, set_fields=(0,), criterion="gini", max_depth=2, min_leaf=1)
    assert tree.split_kind == "categories"
    assert tree.is_leaf is False
    groups = tree.groups
    assert sorted(map(sorted, groups)) == [[0.0], [1.0]]


def test_pessimistic_error_bounds():
    cf = 0.25
    # e=0 closed form: n * (1 - cf**(1/n))
    assert pessimistic_error(1, 0, cf) == pytest.approx(0.75)
    assert pessimistic_error(6, 0, cf) == pytest.approx(6 * (1 - 0.25 ** (1 / 6)))
    assert pessimistic_error(10, 0, cf) > 0.0  # bound exceeds observed errors
    assert pessimistic_error(10, 2, cf) > pessimistic_error(10, 1, cf)
    assert pessimistic_error(10, 1, cf) > 1.0
    assert pessimistic_error(5, 5, cf) == 5.0


def test_prune_collapses_noise_leaf():
    # one mislabeled point in an otherwise clean half: the unpruned tree
    # isolates it, the pessimistic bound says the extra splits do not pay
    x = np.arange(1.0, 21.0)
    y = (x <= 10).astype(float)
    y[2] = 0.0  # noise
    X = x.reshape(-1, 1)
    tree = grow_binary_tree(X, y, set_fields=(), criterion="gain_ratio", max_depth=8, min_leaf=1)
    pruned = prune_pessimistic(tree, 0.25)
    assert count_leaves(tree) > 2
    assert count_leaves(pruned) == 2  # the real boundary at 10.5 survives


def test_prune_collapses_unhelpful_split_entirely():
    X = np.array([[1.0], [2.0], [3.0], [4.0]])
    y = np.array([1.0, 1.0, 0.0, 1.0])
    tree = grow_binary_tree(X, y, set_fields=(), criterion="gain_ratio", max_depth=8, min_leaf=1)
    assert not tree.is_leaf
    pruned = prune_pessimistic(tree, 0.25)
    assert pruned.is_leaf


def test_cart_on_reference(reference_split, train_config):
    train_ds, test_ds = reference_split
    model = train("cart", train_ds, train_config)
    proba = predict_proba(model, test_ds.X)
    assert np.all((proba >= 0.0) & (proba <= 1.0))
    acc = float(((proba >= 0.5) == (test_ds.y == 1.0)).mean())
    assert acc >= 0.95
    est = model.estimator
    assert set(est.used_field_indices()) == split_fields(est.tree_)


def test_c5_uses_rule_fields(reference_split, train_config):
    train_ds, _ = reference_split
    model = train("c5", train_ds, train_config)
    used = {train_ds.schema.predictors[j].name for j in model.estimator.used_field_indices()}
    assert "Mold temprature" in used
    assert "Hardness" in used


def test_tree_serialization_round_trip(tmp_path, reference_split, train_config):
    train_ds, test_ds = reference_split
    for kind in ("cart", "c5", "chaid", "quest"):
        model = train(kind, train_ds, train_config)
        path = tmp_path / f"{kind}.json"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.kind == kind
        assert np.array_equal(
            predict_proba(loaded, test_ds.X), predict_proba(model, test_ds.X)
        )


def test_render_model_tree(reference_split, train_config):
    train_ds, _ = reference_split
    model = train("cart", train_ds, train_config)
    text = render_model_tree(model)
    assert "Mold temprature" in text
    assert "normal" in text and "defective" in text


def test_constant_class_training():
    X = np.array([[1.0, 0.0], [2.0, 1.0], [3.0, 0.0]])
    y = np.ones(3)
    est = CartClassifier()
    est.fit(X, y)
    assert est.warning_ is not None
    assert np.array_equal(est.predict_proba(np.array([[9.0, 1.0]])), [1.0])
    assert est.used_field_indices() == ()


def test_bonferroni_multipliers():
    # ordinal: C(c-1, r-1); nominal: Kass's alternating sum
    assert bonferroni_multiplier(4, 2, ordinal=True) == pytest.approx(3.0)
    assert bonferroni_multiplier(5, 3, ordinal=True) == pytest.approx(6.0)
    assert bonferroni_multiplier(3, 2, ordinal=False) == pytest.approx(3.0)
    assert bonferroni_multiplier(4, 2, ordinal=False) == pytest.approx(7.0)
    assert bonferroni_multiplier(3, 3, ordinal=False) == pytest.approx(1.0)


def test_merge_categories_merges_similar_groups():
    # categories 0 and 1 have identical class mixes; 2 is pure defective
    cats = np.array([0.0] * 8 + [1.0] * 8 + [2.0] * 8)
    y = np.array([1.0] * 6 + [0.0] * 2 + [1.0] * 6 + [0.0] * 2 + [0.0] * 8)
    groups = merge_categories(cats, y, levels=(0.0, 1.0, 2.0), alpha=0.05, ordinal=True)
    assert sorted(map(sorted, groups)) == [[0.0, 1.0], [2.0]]


def test_merge_categories_keeps_distinct_groups():
    cats = np.array([0.0] * 10 + [1.0] * 10)
    y = np.array([1.0] * 10 + [0.0] * 10)
    groups = merge_categories(cats, y, levels=(0.0, 1.0), alpha=0.05, ordinal=True)
    assert len(groups) == 2


def test_chaid_alpha_controls_growth(reference_split):
    train_ds, test_ds = reference_split
    strict = ChaidClassifier(alpha=1e-30, set_fields=train_ds.schema.set_predictor_indices())
    strict.fit(train_ds.X, train_ds.y)
    loose = train("chaid", train_ds, TrainConfig(seed=13))
    assert count_leaves(strict.tree_) <= count_leaves(loose.estimator.tree_)
    proba = predict_proba(loose, test_ds.X)
    acc = float(((proba >= 0.5) == (test_ds.y == 1.0)).mean())
    assert acc >= 0.85


def test_chaid_stores_bin_edges(reference_split, train_config):
    train_ds, _ = reference_split
    model = train("chaid", train_ds, train_config)
    est = model.estimator
    assert est.bin_edges_  # discretized range fields recorded for rules
    for edges in est.bin_edges_.values():
        assert list(edges) == sorted(edges)


def test_qda_split_point_symmetric():
    x0 = np.array([-1.0, 0.0, 1.0])
    x1 = np.array([9.0, 10.0, 11.0])
    point = qda_split_point(x0, x1)
    assert point == pytest.approx(5.0)


def test_qda_split_point_between_means():
    rng = np.random.default_rng(3)
    for _ in range(20):
        x0 = rng.normal(0.0, rng.uniform(0.5, 2.0), size=30)
        x1 = rng.normal(rng.uniform(3.0, 6.0), rng.uniform(0.5, 2.0), size=40)
        point = qda_split_point(x0, x1)
        lo, hi = sorted([x0.mean(), x1.mean()])
        assert lo < point < hi


def test_qda_split_point_equal_means():
    x = np.array([1.0, 2.0, 3.0])
    assert qda_split_point(x, x.copy()) is None


def test_quest_on_reference(reference_split, train_config):
    train_ds, test_ds = reference_split
    model = train("quest", train_ds, train_config)
    proba = predict_proba(model, test_ds.X)
    acc = float(((proba >= 0.5) == (test_ds.y == 1.0)).mean())
    assert acc >= 0.9


def test_nbayes_hand_posterior():
    # one binary set field; Laplace 1 smoothing over 2 seen categories:
    # P(x=1 | normal) = (2+1)/(3+2), P(x=1 | defective) = (0+1)/(1+2)
    X = np.array([[1.0], [1.0], [0.0], [0.0]])
    y = np.array([1.0, 1.0, 1.0, 0.0])
    est = NBayesClassifier(set_fields=(0,))
    est.fit(X, y)
    prior_n, prior_d = 3 / 4, 1 / 4
    like_n, like_d = (2 + 1) / (3 + 2), (0 + 1) / (1 + 2)
    expected = prior_n * like_n / (prior_n * like_n + prior_d * like_d)
    assert est.predict_proba(np.array([[1.0]]))[0] == pytest.approx(expected)


def test_nbayes_on_reference(reference_split, train_config):
    train_ds, test_ds = reference_split
    model = train("nbayes", train_ds, train_config)
    proba = predict_proba(model, test_ds.X)
    acc = float(((proba >= 0.5) == (test_ds.y == 1.0)).mean())
    assert acc >= 0.85


def test_nbayes_serialization(tmp_path, reference_split, train_config):
    train_ds, test_ds = reference_split
    model = train("nbayes", train_ds, train_config)
    path = tmp_path / "nb.json"
    save_model(model, path)
    loaded = load_model(path)
    assert np.allclose(
        predict_proba(loaded, test_ds.X), predict_proba(model, test_ds.X)
    )


def test_power_of_two_scaling_invariance(reference_split, train_config):
    # scaling a column by a power of two moves thresholds exactly with the
    # data, so predictions are unchanged
    train_ds, test_ds = reference_split
    base = CartClassifier()
    base.fit(train_ds.X, train_ds.y)
    scale = np.ones(train_ds.X.shape[1])
    scale[0] = 4.0
    scaled = CartClassifier()
    scaled.fit(train_ds.X * scale, train_ds.y)
    assert np.array_equal(
        base.predict(test_ds.X), scaled.predict(test_ds.X * scale)
    )
