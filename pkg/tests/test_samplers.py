import math

import numpy as np
import pytest

from stablefpt import (
    RngStream,
    make_params,
    sample_exponential,
    sample_overshoot_exact,
    sample_stable_increment,
    standard_stable,
)
from stablefpt.laws import overshoot_cdf
from stablefpt.stats import EmpiricalDistribution, ks_one_sample

N = 200_000


@pytest.mark.parametrize("rho", [1 / 3, 0.5, 2 / 3])
def test_positivity_parameter(rho):
    # P(X_1 >= 0) must equal rho; binomial 4-sigma band
    p = make_params(1.5, rho)
    draws = standard_stable(p, RngStream(11, int(rho * 100)), N)
    frac = float((draws >= 0).mean())
    band = 4.0 * math.sqrt(rho * (1 - rho) / N)
    assert abs(frac - rho) < band


def test_brownian_marginal():
    # alpha=2 reduces to N(0, 2) under this normalization
    p = make_params(2.0, 0.5)
    draws = standard_stable(p, RngStream(11, 7), N)
    assert abs(draws.mean()) < 4.0 * math.sqrt(2.0 / N)
    assert draws.var() == pytest.approx(2.0, rel=0.02)


def test_stability_under_summation():
    # sum of n iid copies rescales by n^(1/alpha): compare 2-draw sums
    # against scaled single draws by two-sample KS
    from stablefpt.stats import ks_two_sample

    p = make_params(1.5, 0.5)
    a = standard_stable(p, RngStream(12, 0), 2 * N // 4).reshape(-1, 2).sum(axis=1)
    b = 2.0 ** (1 / 1.5) * standard_stable(p, RngStream(12, 1), N // 4)
    _, pval = ks_two_sample(
        EmpiricalDistribution.from_samples(a),
        EmpiricalDistribution.from_samples(b),
    )
    assert pval > 0.001


def test_increment_scaling():
    p = make_params(1.5, 0.5, scale=2.0)
    dt = 1e-3
    inc = sample_stable_increment(p, dt, RngStream(13), 50_000)
    ref = standard_stable(p, RngStream(13), 50_000)
    np.testing.assert_allclose(inc, 2.0 * dt ** (1 / 1.5) * ref)


def test_exponential_rate():
    draws = sample_exponential(2.0, RngStream(14), N)
    assert draws.mean() == pytest.approx(0.5, rel=0.02)


def test_overshoot_exact_matches_cdf():
    p = make_params(1.5, 0.5)
    draws = sample_overshoot_exact(p, 1.0, RngStream(15), 50_000)
    assert np.all(draws >= 1.0)
    d = ks_one_sample(
        EmpiricalDistribution.from_samples(draws),
        lambda y: overshoot_cdf(p, 1.0, y),
    )
    assert d < 1.63 / math.sqrt(50_000)


def test_overshoot_exact_rejects_creeping():
    p = make_params(1.5, 2 / 3)  # alpha*rho = 1, no jump over the level
    with pytest.raises(ValueError):
        sample_overshoot_exact(p, 1.0, RngStream(16), 10)


def test_scalar_draws():
    p = make_params(1.5, 0.5)
    assert np.isscalar(standard_stable(p, RngStream(17)))
    assert np.isscalar(sample_exponential(1.0, RngStream(17)))
