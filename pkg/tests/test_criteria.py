import math

import numpy as np
import pytest
import scipy.stats

from faultbench.classifiers.criteria import (
    anova_f,
    anova_f_pvalue,
    chi_square,
    chi_square_pvalue,
    entropy,
    gini_impurity,
)
from faultbench.errors import DataError


def test_gini_hand_values():
    assert gini_impurity((5, 5)) == pytest.approx(0.5)
    assert gini_impurity((0, 10)) == pytest.approx(0.0)
    assert gini_impurity((2, 6)) == pytest.approx(1.0 - 0.25**2 - 0.75**2)


def test_entropy_hand_values():
    assert entropy((5, 5)) == pytest.approx(1.0)  # bits
    assert entropy((0, 10)) == pytest.approx(0.0)
    expected = -(0.25 * math.log2(0.25) + 0.75 * math.log2(0.75))
    assert entropy((2, 6)) == pytest.approx(expected)


def test_chi_square_hand_value():
    # 2x2 table [[10,20],[30,40]]: expected = [[12,18],[28,42]]
    stat, dof = chi_square(np.array([[10, 20], [30, 40]], dtype=float))
    expected = 4 / 12 + 4 / 18 + 4 / 28 + 4 / 42
    assert stat == pytest.approx(expected)
    assert dof == 1


def test_chi_square_pvalue_matches_scipy():
    rng = np.random.default_rng(0)
    for _ in range(20):
        table = rng.integers(1, 40, size=(rng.integers(2, 5), 2)).astype(float)
        stat, dof = chi_square(table)
        assert chi_square_pvalue(stat, dof) == pytest.approx(
            scipy.stats.chi2.sf(stat, dof), abs=1e-12
        )


def test_chi_square_rejects_zero_margins():
    with pytest.raises(DataError):
        chi_square(np.array([[0, 0], [3, 4]], dtype=float))
    with pytest.raises(DataError):
        chi_square(np.array([[0, 3], [0, 4]], dtype=float))


def test_anova_matches_scipy():
    rng = np.random.default_rng(1)
    for _ in range(20):
        groups = [rng.normal(rng.uniform(-1, 1), 1.0, size=rng.integers(3, 12))
                  for _ in range(rng.integers(2, 5))]
        values = np.concatenate(groups)
        labels = np.concatenate(
            [np.full(g.size, float(i)) for i, g in enumerate(groups)]
        )
        stat, df1, df2 = anova_f(values, labels)
        ref = scipy.stats.f_oneway(*groups)
        assert stat == pytest.approx(ref.statistic, rel=1e-10)
        assert anova_f_pvalue(stat, df1, df2) == pytest.approx(ref.pvalue, rel=1e-9)


def test_anova_zero_within_variance():
    values = np.array([1.0, 1.0, 2.0, 2.0])
    labels = np.array([0.0, 0.0, 1.0, 1.0])
    stat, df1, df2 = anova_f(values, labels)
    assert math.isinf(stat)
    assert anova_f_pvalue(stat, df1, df2) == 0.0
    same, _, _ = anova_f(np.ones(4), labels)
    assert same == 0.0
