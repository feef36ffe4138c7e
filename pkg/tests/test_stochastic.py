import math
from collections import Counter

import numpy as np
import pytest

from temprisk.errors import GenerationError, ValidationError
from temprisk.robustness import ConstraintChecker
from temprisk.scenarios import example1_signal
from temprisk.signal import GroupPartition, sample_equal
from temprisk.stochastic import (
    McConfig, ProcessModel, ShiftDistribution, gauss, mc_risk, poisson, realize,
    robustness_samples, stream,
)

P2 = GroupPartition.per_component(2)


def model(d=3, noise=None, seed=7):
    return ProcessModel("example1", {"a": 0.04, "b": 1.05}, P2,
                        [ShiftDistribution.uniform(d)] * 2, noise or {}, seed)


def test_realizations_reproducible():
    m = model(noise={"b": 0.05})
    times = range(0, 401)
    assert sample_equal(realize(m, 3), realize(m, 3), times)
    assert not sample_equal(realize(m, 3), realize(m, 4), times)


def test_stream_independent_of_order():
    a = [stream(1, i).random() for i in range(5)]
    b = [stream(1, i).random() for i in reversed(range(5))][::-1]
    assert a == b


def test_uniform_shift_chi_square():
    d = 3
    dist = ShiftDistribution.uniform(d)
    draws = [dist.draw(stream(11, i)) for i in range(21000)]
    counts = Counter(draws)
    assert set(counts) == set(range(-d, d + 1))
    expected = len(draws) / (2 * d + 1)
    chi2 = sum((counts[k] - expected) ** 2 / expected for k in counts)
    assert chi2 < 22.46  # df=6, p=0.001


def test_poisson_moments():
    lam = 3.0
    x = np.array([poisson(stream(5, i), lam) for i in range(20000)])
    assert abs(x.mean() - lam) < 0.08
    assert abs(x.var() - lam) < 0.2
    assert ShiftDistribution.poisson(lam).draw(stream(5, 0)) == -poisson(stream(5, 0), lam)


def test_gauss_moments():
    x = np.array([gauss(stream(9, i)) for i in range(20000)])
    assert abs(x.mean()) < 0.03
    assert abs(x.std() - 1) < 0.03


def test_distribution_validation():
    with pytest.raises(ValidationError):
        ShiftDistribution("uniform", d=-1)
    with pytest.raises(ValidationError):
        ShiftDistribution.poisson(0.0)
    with pytest.raises(ValidationError):
        ProcessModel("example1", {}, P2, [ShiftDistribution.fixed()], {}, 0)
    with pytest.raises(GenerationError):
        ProcessModel("nope", {}, P2, [ShiftDistribution.fixed()] * 2).base()


def test_model_dict_round_trip():
    m = model(noise={"b": 0.1})
    again = ProcessModel.from_dict(m.to_dict())
    assert again.to_dict() == m.to_dict()
    assert again.draw(5)[1].tolist() == m.draw(5)[1].tolist()


def test_noise_draws_shared_across_shift_models():
    # same seed, same noise: parameters agree whatever the shift distribution
    a = model(d=0, noise={"b": 0.1})
    b = model(d=5, noise={"b": 0.1})
    for i in range(10):
        assert a.draw(i)[0] == b.draw(i)[0]


def test_memo_path_matches_direct_scans():
    _, c = example1_signal()
    m = model(d=4)
    memo = robustness_samples(m, "theta", 15, ConstraintChecker(c), 60)
    noisy = ProcessModel(m.generator, m.params, m.partition, m.shifts, {"b": 0.0}, m.seed)
    assert not noisy.has_noise
    from temprisk.stochastic import _chunk
    rows = _chunk(m, "theta", 15, ConstraintChecker(c), range(60))
    assert memo[0].tolist() == [r[0] for r in rows]


def test_parallel_matches_serial():
    _, c = example1_signal()
    m = model(d=2, noise={"b": 0.02})
    serial = robustness_samples(m, "eta", 20, ConstraintChecker(c), 64, workers=1)
    parallel = robustness_samples(m, "eta", 20, ConstraintChecker(c), 64, workers=2)
    for a, b in zip(serial, parallel):
        assert np.array_equal(a, b)


def test_mc_risk_report():
    _, c = example1_signal()
    res = mc_risk(model(d=0), McConfig(200, 30, "eta", ConstraintChecker(c), (0.9,), 0.1))
    assert res.report.var[(0.9, 0.1)] == (-12.0, -12.0)
    assert res.report.violation_count == 0
    assert np.all(res.costs == -12)


def test_config_validation():
    with pytest.raises(ValidationError):
        McConfig(0, 5, "eta", object())
    with pytest.raises(ValidationError):
        McConfig(10, 5, "zeta", object())
    with pytest.raises(ValidationError):
        McConfig(10, 5, "eta", None)
