import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from temprisk.errors import InsufficientSamplesError, ValidationError
from temprisk.risk import (
    RiskReport, SampleSet, cvar_estimate, empirical_var, expectation, gamma, required_samples,
    risk_report, var_bounds, var_exact, var_indices,
)

# order-statistic indices computed at 50 digits with mpmath
FROZEN_INDICES = {
    (10000, 0.95, 0.01): (9337, 9663),
    (10000, 0.98, 0.01): (9637, 9963),
    (2000, 0.9, 0.05): (1739, 1861),
    (1000, 0.85, 0.1): (811, 889),
}


@pytest.mark.parametrize("key", sorted(FROZEN_INDICES))
def test_var_indices_frozen(key):
    assert var_indices(*key) == FROZEN_INDICES[key]


def test_gamma_value():
    assert gamma(10000, 0.01) == pytest.approx(0.016276236307187293, rel=1e-14)


def test_insufficient_samples_hint():
    with pytest.raises(InsufficientSamplesError) as exc:
        var_indices(10, 0.98, 0.01)
    need = exc.value.required_n
    assert need == 6623
    assert gamma(need, 0.01) <= 0.02 < gamma(need - 1, 0.01)
    assert required_samples(0.95, 0.01) == 1060


def test_integral_products_not_bumped():
    # N*(beta+gamma) lands on an integer up to rounding noise
    N, delta = 200, 0.5
    g = gamma(N, delta)
    beta = 0.75 - g + 1e-13
    lo, hi = var_indices(N, beta, delta)
    assert hi == 150


def test_var_bounds_sorted_and_clamped():
    z = SampleSet(np.arange(100.0)[::-1])
    lo, hi = var_bounds(z, 0.5, 0.05)
    assert lo <= empirical_var(z, 0.5) <= hi


def test_var_exact():
    assert var_exact({-1: 0.5, 0: 0.3, 2: 0.2}, beta=0.8) == 0.0
    assert var_exact({-1: 0.5, 0: 0.3, 2: 0.2}, beta=0.81) == 2.0
    assert var_exact([3, 1], [0.5, 0.5], beta=0.5) == 1.0
    with pytest.raises(ValidationError):
        var_exact({0: 0.5, 1: 0.6})


def _cvar_brute(z, beta):
    z = list(z)
    return min(a + sum(max(v - a, 0.0) for v in z) / ((1 - beta) * len(z)) for a in z)


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=60), st.sampled_from([0.5, 0.8, 0.95]))
@settings(max_examples=150)
def test_cvar_matches_brute_force(values, beta):
    z = SampleSet(values)
    assert cvar_estimate(z, beta) == pytest.approx(_cvar_brute(values, beta), abs=1e-9)


@given(st.lists(st.integers(-20, 20), min_size=5, max_size=60), st.integers(-5, 5))
@settings(max_examples=100)
def test_risk_monotone_and_translation_invariant(values, c):
    z = SampleSet(values)
    assert cvar_estimate(z + c, 0.9) == pytest.approx(cvar_estimate(z, 0.9) + c)
    bigger = SampleSet(np.asarray(values) + np.abs(np.arange(len(values)) % 3))
    assert cvar_estimate(bigger, 0.9) >= cvar_estimate(z, 0.9) - 1e-12
    assert cvar_estimate(z, 0.9) >= empirical_var(z, 0.9) - 1e-12


def test_sample_set_validation():
    with pytest.raises(ValidationError):
        SampleSet([])
    with pytest.raises(ValidationError):
        SampleSet([1.0, math.inf])


def test_report_round_trip():
    z = SampleSet(np.linspace(-5, 3, 2000))
    rep = risk_report(z, (0.9, 0.95), 0.05, violation_count=7)
    again = RiskReport.from_dict(json.loads(rep.to_json()))
    assert again == rep
    assert rep.to_dict()["schema"] == 1
    assert rep.expectation == pytest.approx(expectation(z))
    assert "VaR_upper_0.95" in rep.to_csv("row")


def test_report_non_strict_collects_errors():
    z = SampleSet([0.0] * 10)
    rep = risk_report(z, (0.98,), 0.01, strict=False)
    assert rep.var == {} and "6623" in rep.errors[0]
    with pytest.raises(InsufficientSamplesError):
        risk_report(z, (0.98,), 0.01)


def test_bracket_coverage_small():
    rng = np.random.default_rng(2)
    support, probs = np.array([-3, -1, 0, 2, 5]), np.array([0.3, 0.3, 0.25, 0.1, 0.05])
    true = var_exact(support, probs, 0.8)
    hits = 0
    for _ in range(100):
        lo, hi = var_bounds(SampleSet(rng.choice(support, size=1500, p=probs)), 0.8, 0.1)
        hits += lo <= true <= hi
    assert hits >= 85
