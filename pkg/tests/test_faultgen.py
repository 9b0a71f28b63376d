import numpy as np
import pytest

from faultbench.dataset import (
    DISTANCE_DEFECT_MAX,
    HARDNESS_THRESHOLD,
    MOLD_THRESHOLD,
    generate_reference,
)
from faultbench.errors import ConfigError, DataError
from faultbench.faultgen import InjectionSpec, inject_faults


def test_exact_injection_count(reference_raw):
    spec = InjectionSpec(fraction=0.10, seed=5)
    injected, indices = inject_faults(reference_raw, spec)
    assert len(indices) == 100
    assert indices == sorted(indices)
    assert len(set(indices)) == 100
    assert all(injected.y[i] == 0.0 for i in indices)


def test_rule_region_mode_satisfies_defect_rule(reference_raw):
    injected, indices = inject_faults(reference_raw, InjectionSpec(0.10, seed=5))
    for i in indices:
        mold, hard, dist = injected.X[i, 0], injected.X[i, 2], injected.X[i, 5]
        assert mold > MOLD_THRESHOLD
        assert hard > HARDNESS_THRESHOLD
        assert dist <= DISTANCE_DEFECT_MAX
        # within schema bounds
        assert mold <= injected.schema.predictors[0].max
        assert hard <= injected.schema.predictors[2].max


def test_non_injected_records_bitwise_unchanged(reference_raw):
    injected, indices = inject_faults(reference_raw, InjectionSpec(0.10, seed=5))
    untouched = np.setdiff1d(np.arange(reference_raw.n_records), np.array(indices))
    assert np.array_equal(
        injected.X[untouched], reference_raw.X[untouched], equal_nan=True
    )
    assert np.array_equal(injected.y[untouched], reference_raw.y[untouched])


def test_injection_determinism(reference_raw):
    a, ia = inject_faults(reference_raw, InjectionSpec(0.10, seed=5))
    b, ib = inject_faults(reference_raw, InjectionSpec(0.10, seed=5))
    c, ic = inject_faults(reference_raw, InjectionSpec(0.10, seed=6))
    assert ia == ib and a.equals(b)
    assert ia != ic


def test_label_prior_from_all_normal(reference_raw):
    normal_only = reference_raw.subset(np.flatnonzero(reference_raw.y == 1.0))
    assert normal_only.n_records == 900
    injected, indices = inject_faults(normal_only, InjectionSpec(0.10, seed=2))
    assert len(indices) == 90
    assert int((injected.y == 0.0).sum()) == 90


def test_zero_fraction_is_identity(reference_raw):
    out, indices = inject_faults(reference_raw, InjectionSpec(0.0, seed=1))
    assert indices == []
    assert out.equals(reference_raw)


def test_field_distortion_mode(reference_raw):
    injected, indices = inject_faults(
        reference_raw, InjectionSpec(0.10, seed=5, mode="field_distortion")
    )
    assert len(indices) == 100
    assert all(injected.y[i] == 0.0 for i in indices)
    changed = 0
    for i in indices:
        before, after = reference_raw.X[i], injected.X[i]
        both = ~(np.isnan(before) | np.isnan(after))
        if not np.array_equal(before[both], after[both]):
            changed += 1
    assert changed > 90  # almost every injected record is perturbed


def test_spec_validation():
    with pytest.raises(ConfigError):
        InjectionSpec(1.5, seed=0)
    with pytest.raises(ConfigError):
        InjectionSpec(-0.1, seed=0)
    with pytest.raises(ConfigError):
        InjectionSpec(0.1, seed=0, mode="chaos")
    with pytest.raises(ConfigError):
        InjectionSpec(0.1, seed=0, mode="field_distortion", distortion_scale=0.0)
    spec = InjectionSpec(0.25, seed=9, mode="field_distortion", distortion_scale=3.0)
    assert InjectionSpec.from_json_dict(spec.to_json_dict()) == spec


def test_unlabeled_dataset_rejected():
    ds = generate_reference(100, 0.10, seed=1)
    import faultbench.dataset as dsmod

    y = np.array(ds.y, copy=True)
    y[0] = np.nan
    unlabeled = dsmod.Dataset(ds.schema, ds.X, y)
    with pytest.raises(DataError):
        inject_faults(unlabeled, InjectionSpec(0.10, seed=0))
