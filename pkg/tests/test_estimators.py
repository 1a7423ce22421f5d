import math

import numpy as np
import pytest

from stablefpt import (
    AsymptoticConstants,
    CensoringError,
    Estimate,
    RngStream,
    SkeletonConfig,
    conditional_lt_limit,
    f_lambda_density,
    first_passage_batch,
    joint_lt_lhs,
    joint_lt_rhs,
    limit_law_cdf,
    make_params,
    randomized_level_rhs,
    supremum_exp_batch,
)
from stablefpt.paths import PassageBatch

P = make_params(1.5, 0.5)


def _fake_batch(t, pos, x=1.0):
    t = np.asarray(t, dtype=float)
    pos = np.asarray(pos, dtype=float)
    return PassageBatch(
        t=t,
        position=pos,
        censored=np.zeros(t.size, dtype=bool),
        dt_used=np.full(t.size, 1e-3),
        x=x,
        attempts=t.size,
    )


def test_estimate_discrepancy():
    a, b = Estimate(1.0, 0.1), Estimate(1.3, 0.0)
    assert a.discrepancy_sigmas(b) == pytest.approx(3.0)
    assert not a.agrees_with(b, n_sigma=2.0)
    assert a.agrees_with(b, n_sigma=3.5)


def test_joint_lt_lhs_mu_zero_reduction(t1_pool_small):
    lam = 1.0
    full = joint_lt_lhs(lam, 0.0, 1.0, t1_pool_small)
    clean = t1_pool_small.uncensored()
    direct = float(np.exp(-lam * clean.t).mean())
    assert full.value == pytest.approx(direct, rel=1e-12)


def test_joint_lt_lhs_rejects_heavy_censoring():
    b = _fake_batch([1.0, 2.0, 3.0], [1.1, 1.2, 1.3])
    b.censored[:2] = True
    with pytest.raises(CensoringError):
        joint_lt_lhs(1.0, 1.0, 1.0, b)


def test_joint_lt_rhs_level_zero_is_one():
    rhs = joint_lt_rhs(1.0, 1.0, 0.0, np.array([0.5, 1.5, 2.5]))
    assert rhs.value == 1.0 and rhs.stderr == 0.0


def test_joint_lt_both_sides_small_run():
    # thinned version of the grid identity; generous 4-sigma band
    n = 4000
    lam = mu = 1.0
    cfg = SkeletonConfig(dt=1e-2, max_time=2e4, tail_dt=0.5, tail_switch=20.0,
                         jitter=False)
    passage = first_passage_batch(P, 1.0, cfg, RngStream(21, 0), n)
    sup = supremum_exp_batch(P, lam, 1e-2, RngStream(21, 1), n)
    lhs = joint_lt_lhs(lam, mu, 1.0, passage)
    rhs = joint_lt_rhs(lam, mu, 1.0, sup)
    assert lhs.discrepancy_sigmas(rhs) < 4.0


def test_randomized_level_rhs_rejects_bad_order():
    with pytest.raises(ValueError):
        randomized_level_rhs(1.0, 2.0, np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        randomized_level_rhs(1.0, 1.0, np.array([1.0, 2.0]))


def test_randomized_level_rhs_mu_zero_reduction():
    # mu -> 0: the expression tends to 1 - E[e^(-gamma*S)], the chance
    # that the exponential level is exceeded before the clock rings
    s = RngStream(22).standard_exponential(20_000)
    rhs = randomized_level_rhs(2.0, 1e-9, s)
    want = 1.0 - float(np.exp(-2.0 * s).mean())
    assert rhs.value == pytest.approx(want, rel=1e-6)


def test_f_lambda_density_level_scaling(t1_pool_small):
    # f_lambda depends on x only through the scaling T_x = x^alpha T_1;
    # choosing lam' = x^(-alpha) makes the exponential weight identical,
    # so the estimates differ by the exact prefactor ratio
    f1 = f_lambda_density(P, 1.0, 1.0, t1_pool_small)
    x = 2.0
    f2 = f_lambda_density(P, x ** -1.5, x, t1_pool_small)
    # prefactor ratio: (lam' * x^alpha / x) / (1 * 1 / 1) = x^(alpha-1) * lam'
    assert f2.value == pytest.approx(f1.value * x**-1.5 * x**0.5, rel=1e-9)


def test_f_lambda_density_requires_unit_level():
    b = _fake_batch([1.0, 2.0], [1.1, 1.2], x=2.0)
    with pytest.raises(ValueError):
        f_lambda_density(P, 1.0, 1.0, b)


def test_f_lambda_matches_finite_difference(t1_pool_small):
    # f_lambda(x) should match the finite difference of
    # P(sup at exp(lam) time <= x) built from an independent route
    lam, x, dx = 1.0, 1.0, 0.1
    f = f_lambda_density(P, lam, x, t1_pool_small)
    sup = supremum_exp_batch(P, lam, 1e-3, RngStream(23), 20_000)
    fd = float(((sup <= x + dx) & (sup > x - dx)).mean()) / (2 * dx)
    assert f.value == pytest.approx(fd, abs=4.0 * 0.02 + 0.05 * f.value)


def test_conditional_lt_limit_positive(t1_pool_small):
    c = AsymptoticConstants.from_k(0.63, 0.5)
    est = conditional_lt_limit(P, c, 1.0, 1.0, t1_pool_small)
    assert 0.0 < est.value < 1.0
    assert est.stderr > 0.0


def test_limit_law_cdf_monotone_bounded(t1_pool_small):
    c = AsymptoticConstants.from_k(0.63, 0.5)
    ts = [0.5, 1.0, 2.0, 5.0, 20.0, 100.0]
    vals = [limit_law_cdf(P, c, 1.0, t, t1_pool_small).value for t in ts]
    assert all(0.0 <= v <= 1.0 for v in vals)
    assert all(a <= b + 0.02 for a, b in zip(vals, vals[1:]))
    assert vals[-1] > 0.8


def test_limit_law_cdf_warns_beyond_horizon():
    b = _fake_batch([1.0, 2.0, 3.0], [1.1, 1.2, 1.3])
    b.censored[2] = True
    c = AsymptoticConstants.from_k(0.63, 0.5)
    with pytest.warns(UserWarning):
        limit_law_cdf(P, c, 1.0, 10.0, b)


def test_limit_law_cdf_rejects_bad_time(t1_pool_small):
    c = AsymptoticConstants.from_k(0.63, 0.5)
    with pytest.raises(ValueError):
        limit_law_cdf(P, c, 1.0, 0.0, t1_pool_small)
