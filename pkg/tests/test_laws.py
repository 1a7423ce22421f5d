import math

import numpy as np
import pytest
from scipy.integrate import quad

from stablefpt import (
    AsymptoticConstants,
    asymptotic_small_lambda,
    kx_pdf,
    kx_small_h_constant,
    make_params,
    overshoot_cdf,
    overshoot_pdf,
)

P = make_params(1.5, 0.5)  # alpha*rho = 0.75 throughout


def test_pdf_normalizes():
    total, err = quad(lambda y: overshoot_pdf(P, 1.0, y), 1.0, np.inf)
    assert total == pytest.approx(1.0, abs=1e-8)


def test_cdf_matches_pdf_quadrature():
    for y in (1.1, 1.5, 3.0, 10.0):
        val, err = quad(lambda u: overshoot_pdf(P, 1.0, u), 1.0, y)
        assert overshoot_cdf(P, 1.0, y) == pytest.approx(val, abs=1e-9)


def test_cdf_zero_below_level():
    assert overshoot_cdf(P, 1.0, 0.5) == 0.0
    assert overshoot_cdf(P, 1.0, 1.0) == 0.0
    assert overshoot_pdf(P, 1.0, 0.99) == 0.0


def test_cdf_monotone_and_bounded():
    ys = np.geomspace(1.0001, 1e4, 200)
    vals = overshoot_cdf(P, 1.0, ys)
    assert np.all(np.diff(vals) > 0)
    assert vals[0] > 0.0 and vals[-1] < 1.0
    assert vals[-1] > 0.99


def test_level_scaling():
    # the law of position/x does not depend on x
    for y in (1.2, 2.0, 5.0):
        assert overshoot_cdf(P, 3.0, 3.0 * y) == pytest.approx(
            overshoot_cdf(P, 1.0, y), rel=1e-12
        )


def test_kx_pdf_is_shifted_passage_density():
    ys = np.array([0.05, 0.5, 2.0])
    np.testing.assert_allclose(kx_pdf(P, 1.0, ys), overshoot_pdf(P, 1.0, 1.0 + ys))
    assert kx_pdf(P, 1.0, -0.1) == 0.0


def test_small_h_constant_value():
    # sin(0.75*pi) / (0.25*pi) at x = 1
    want = math.sin(0.75 * math.pi) / (0.25 * math.pi)
    assert kx_small_h_constant(P, 1.0) == pytest.approx(want, rel=1e-12)


def test_small_h_constant_level_scaling():
    ratio = kx_small_h_constant(P, 4.0) / kx_small_h_constant(P, 1.0)
    assert ratio == pytest.approx(4.0 ** (0.75 - 1.0), rel=1e-12)


def test_creeping_rejected():
    creeping = make_params(1.5, 2 / 3)
    with pytest.raises(ValueError):
        overshoot_pdf(creeping, 1.0, 2.0)
    with pytest.raises(ValueError):
        kx_small_h_constant(creeping, 1.0)


def test_asymptotic_small_lambda_consistency():
    # the truncated forms must interpolate between 0 at x->large mu and
    # the full-Gamma forms as mu*x -> 0 / infinity
    c = AsymptoticConstants.from_k(0.5, P.rho)
    x, mu = 1.0, 2.0
    full = asymptotic_small_lambda(P, c, x, mu, which=3)
    trunc = asymptotic_small_lambda(P, c, x, mu, which=2)
    assert 0.0 < trunc < full
    # the truncation vanishes as x -> 0, recovering the full transform
    small_x = asymptotic_small_lambda(P, c, 1e-9, mu, which=2)
    assert small_x == pytest.approx(full, rel=1e-6)
    # which=1 is the mu-free mass k* x^(alpha rho)
    assert asymptotic_small_lambda(P, c, 2.0, 0.0, which=1) == pytest.approx(
        c.k_star * 2.0**0.75, rel=1e-12
    )


@pytest.mark.parametrize("which,power", [(2, 0.75), (4, -0.25)])
def test_asymptotic_quadrature_oracle(which, power):
    # the truncated forms reduce to upper-gamma integrals; check them
    # against adaptive quadrature of t^power * exp(-t) over (mu*x, inf)
    c = AsymptoticConstants.from_k(0.5, P.rho)
    x, mu = 1.0, 1.5
    lhs = asymptotic_small_lambda(P, c, x, mu, which=which)
    g, _ = quad(lambda t: t**power * math.exp(-t), mu * x, np.inf)
    scale = c.k_star if which == 2 else c.k_star * 0.75
    assert lhs == pytest.approx(scale * g / mu**0.75, rel=1e-9)


def test_constants_validation():
    with pytest.raises(ValueError):
        AsymptoticConstants(k=-1.0, k_star=1.0)
    c = AsymptoticConstants.from_k(0.5, 0.5)
    assert c.k_star == pytest.approx(0.5 * math.gamma(0.5), rel=1e-14)
