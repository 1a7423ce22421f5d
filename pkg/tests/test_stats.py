import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats as sps

from stablefpt import (
    EmpiricalDistribution,
    RngStream,
    bootstrap_ci,
    ecdf,
    ks_one_sample,
    ks_two_sample,
    loglog_fit,
    max_cdf_jump,
    mean_ci,
)
from stablefpt.stats import kolmogorov_sf


def test_ecdf_basics():
    d = EmpiricalDistribution.from_samples([3.0, 1.0, 2.0])
    assert ecdf(d, 0.5) == 0.0
    assert ecdf(d, 1.0) == pytest.approx(1 / 3)
    assert ecdf(d, 2.5) == pytest.approx(2 / 3)
    assert ecdf(d, 10.0) == 1.0
    np.testing.assert_allclose(ecdf(d, np.array([1.0, 3.0])), [1 / 3, 1.0])


@given(st.lists(st.floats(-100, 100), min_size=1, max_size=50))
def test_ecdf_monotone(values):
    d = EmpiricalDistribution.from_samples(values)
    grid = np.linspace(min(values) - 1, max(values) + 1, 50)
    vals = np.asarray(ecdf(d, grid))
    assert np.all(np.diff(vals) >= 0)
    assert vals[0] == 0.0 or min(values) <= grid[0]
    assert vals[-1] == 1.0


def test_weighted_ecdf():
    d = EmpiricalDistribution.from_samples([1.0, 2.0], weights=[3.0, 1.0])
    assert ecdf(d, 1.5) == pytest.approx(0.75)


def test_ks_one_sample_against_scipy():
    x = RngStream(1).uniform(0, 1, 500)
    ours = ks_one_sample(EmpiricalDistribution.from_samples(x), lambda v: np.clip(v, 0, 1))
    ref = sps.kstest(x, "uniform").statistic
    assert ours == pytest.approx(ref, abs=1e-12)


def test_ks_one_sample_detects_shift():
    x = RngStream(2).uniform(0, 1, 2000) ** 2
    d = ks_one_sample(EmpiricalDistribution.from_samples(x), lambda v: np.clip(v, 0, 1))
    assert d > 0.2


def test_kolmogorov_sf_against_scipy():
    for x in (0.5, 1.0, 1.63, 2.0):
        assert kolmogorov_sf(x) == pytest.approx(sps.kstwobign.sf(x), abs=1e-10)


def test_ks_two_sample_against_scipy():
    a = RngStream(3, 0).uniform(0, 1, 300)
    b = RngStream(3, 1).uniform(0, 1, 400) ** 1.1
    d, p = ks_two_sample(
        EmpiricalDistribution.from_samples(a),
        EmpiricalDistribution.from_samples(b),
    )
    ref = sps.ks_2samp(a, b, method="asymp")
    assert d == pytest.approx(ref.statistic, abs=1e-12)
    # scipy applies a small-sample continuity correction to the argument;
    # agreement is only asymptotic
    assert p == pytest.approx(ref.pvalue, rel=0.15, abs=1e-6)


def test_ks_two_sample_min_size():
    small = EmpiricalDistribution.from_samples(np.arange(10.0))
    big = EmpiricalDistribution.from_samples(np.arange(100.0))
    with pytest.raises(ValueError):
        ks_two_sample(small, big)


def test_loglog_fit_exact_power_law():
    xs = np.geomspace(0.01, 0.1, 8)
    fit = loglog_fit(list(zip(xs, 0.5 * xs**0.75)))
    assert fit.slope == pytest.approx(0.75, abs=1e-12)
    assert math.exp(fit.intercept) == pytest.approx(0.5, rel=1e-12)
    assert fit.stderr_slope == pytest.approx(0.0, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)


def test_loglog_fit_drops_nonpositive():
    xs = np.geomspace(0.01, 0.1, 8)
    pts = list(zip(xs, 0.5 * xs**0.75))
    pts[0] = (xs[0], 0.0)
    with pytest.warns(UserWarning):
        fit = loglog_fit(pts)
    assert fit.slope == pytest.approx(0.75, abs=1e-9)
    with pytest.raises(ValueError):
        loglog_fit([(0.1, 0.0), (0.2, 0.0), (0.3, 0.0)])


def test_max_cdf_jump():
    clean = EmpiricalDistribution.from_samples(np.linspace(0, 1, 100))
    assert max_cdf_jump(clean) == pytest.approx(0.01)
    atoms = EmpiricalDistribution.from_samples([1.0] * 30 + list(np.linspace(2, 3, 70)))
    assert max_cdf_jump(atoms) == pytest.approx(0.30)


def test_mean_ci_coverage_shape():
    m, se, hw = mean_ci(RngStream(4).uniform(0, 1, 10_000))
    assert m == pytest.approx(0.5, abs=0.02)
    assert se == pytest.approx(math.sqrt(1 / 12 / 10_000), rel=0.05)
    assert hw == pytest.approx(1.96 * se, rel=1e-9)


def test_bootstrap_ci_brackets_mean():
    values = RngStream(5).standard_exponential(2000)
    lo, hi = bootstrap_ci(values, RngStream(6))
    assert lo < float(np.mean(values)) < hi
    assert hi - lo < 0.2


def test_empirical_distribution_validation():
    with pytest.raises(ValueError):
        EmpiricalDistribution.from_samples([])
    d = EmpiricalDistribution.from_samples([2.0, 1.0], weights=[1.0, 1.0])
    assert d.weights.sum() == pytest.approx(1.0)
    assert np.all(np.diff(d.samples) >= 0)
