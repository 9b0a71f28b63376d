"""Split-quality and independence statistics shared by the tree learners."""

from __future__ import annotations

import numpy as np
from scipy import special

from ..errors import DataError


def gini_impurity(counts) -> float:
    """1 - sum(p_i^2); at most 0.5 for two classes, 0 for a pure node."""
    c = np.asarray(counts, dtype=np.float64).ravel()
    if (c < 0).any():
        raise DataError("class counts must be nonnegative")
    total = c.sum()
    if total <= 0:
        raise DataError("class counts must sum to a positive total")
    p = c / total
    return float(1.0 - np.sum(p * p))


def entropy(counts) -> float:
    """Shannon entropy in bits, with 0 * log 0 taken as 0."""
    c = np.asarray(counts, dtype=np.float64).ravel()
    if (c < 0).any():
        raise DataError("class counts must be nonnegative")
    total = c.sum()
    if total <= 0:
        raise DataError("class counts must sum to a positive total")
    p = c[c > 0] / total
    return float(-np.sum(p * np.log2(p)))


def chi_square(table) -> tuple[float, int]:
    """Pearson chi-square statistic and degrees of freedom for a count table.

    Expected counts come from the marginals; rows or columns summing to zero
    are degenerate and rejected.
    """
    obs = np.asarray(table, dtype=np.float64)
    if obs.ndim != 2 or obs.shape[0] < 2 or obs.shape[1] < 2:
        raise DataError(f"need a table of at least 2x2, got shape {obs.shape}")
    if (obs < 0).any():
        raise DataError("table counts must be nonnegative")
    row = obs.sum(axis=1)
    col = obs.sum(axis=0)
    if (row == 0).any() or (col == 0).any():
        raise DataError("chi-square table has a zero row or column margin")
    expected = np.outer(row, col) / obs.sum()
    stat = float(((obs - expected) ** 2 / expected).sum())
    dof = (obs.shape[0] - 1) * (obs.shape[1] - 1)
    return stat, dof


def chi_square_pvalue(stat: float, dof: int) -> float:
    """Upper-tail probability of the chi-square distribution."""
    return float(special.chdtrc(dof, stat))


def anova_f(values, labels) -> tuple[float, int, int]:
    """One-way ANOVA F statistic across label groups, with its df pair.

    Zero within-group variance yields inf (means differ) or 0 (all equal).
    """
    x = np.asarray(values, dtype=np.float64).ravel()
    g = np.asarray(labels).ravel()
    groups = [x[g == level] for level in np.unique(g)]
    if len(groups) < 2:
        raise DataError("ANOVA needs at least two groups")
    n = x.size
    df1 = len(groups) - 1
    df2 = n - len(groups)
    if df2 < 1:
        raise DataError("ANOVA needs more records than groups")
    grand = x.mean()
    ss_between = sum(len(v) * (v.mean() - grand) ** 2 for v in groups)
    ss_within = sum(((v - v.mean()) ** 2).sum() for v in groups)
    if ss_within == 0.0:
        return (np.inf if ss_between > 0 else 0.0), df1, df2
    return float((ss_between / df1) / (ss_within / df2)), df1, df2


def anova_f_pvalue(f_stat: float, df1: int, df2: int) -> float:
    """Upper-tail probability of the F distribution."""
    if np.isinf(f_stat):
        return 0.0
    return float(special.fdtrc(df1, df2, f_stat))
