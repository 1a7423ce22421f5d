"""Closed-form laws of the passage functionals: the Beta-ratio density and
CDF of the position at first passage, the overshoot density, the small-
window constant for P(K_x <= h), and the four small-lambda coefficients
of the supremum-at-exponential-time quantities.

All of them require alpha*rho < 1 (the spectrally negative boundary
crosses continuously and has no overshoot law of this form).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import StableParams
from .special import gamma_fn, reg_inc_beta, upper_inc_gamma

__all__ = [
    "AsymptoticConstants",
    "overshoot_pdf",
    "overshoot_cdf",
    "kx_pdf",
    "kx_small_h_constant",
    "asymptotic_small_lambda",
]


def _require_no_creeping(params: StableParams, what: str) -> None:
    if params.alpha_rho >= 1.0 - 1e-12:
        raise ValueError(
            f"{what} requires alpha*rho < 1; alpha*rho = {params.alpha_rho} "
            "(spectrally negative case creeps over the level)"
        )


@dataclass(frozen=True)
class AsymptoticConstants:
    """The small-x supremum constant k and its companion k* = k*Gamma(1-rho)."""

    k: float
    k_star: float

    def __post_init__(self):
        if self.k <= 0.0 or self.k_star <= 0.0:
            raise ValueError("constants must be positive")

    @classmethod
    def from_k(cls, k: float, rho: float) -> "AsymptoticConstants":
        return cls(k=k, k_star=k * gamma_fn(1.0 - rho))


def overshoot_pdf(params: StableParams, x: float, y) -> float | np.ndarray:
    """Density of the position at first passage over x, evaluated at y.

    sin(pi*a*r)/pi * (1/y) * (x/(y-x))^(a*r) on y > x, zero elsewhere.
    """
    _require_no_creeping(params, "overshoot_pdf")
    if x <= 0.0:
        raise ValueError(f"level x must be positive, got {x}")
    ar = params.alpha_rho
    c = math.sin(math.pi * ar) / math.pi
    y_arr = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.where(
            y_arr > x, c / y_arr * (x / np.maximum(y_arr - x, 0.0)) ** ar, 0.0
        )
    if np.isscalar(y):
        return float(val)
    return val


def overshoot_cdf(params: StableParams, x: float, y) -> float | np.ndarray:
    """P(position at first passage over x is <= y) = I_{(y-x)/y}(1-ar, ar).

    Evaluated through the complementary incomplete beta so that values
    for y close to x keep full relative precision.
    """
    _require_no_creeping(params, "overshoot_cdf")
    if x <= 0.0:
        raise ValueError(f"level x must be positive, got {x}")
    ar = params.alpha_rho

    def _one(yv: float) -> float:
        if yv <= x:
            return 0.0
        return reg_inc_beta(1.0 - ar, ar, (yv - x) / yv)

    if np.isscalar(y):
        return _one(float(y))
    return np.array([_one(float(v)) for v in np.asarray(y, dtype=float).ravel()]).reshape(
        np.shape(y)
    )


def kx_pdf(params: StableParams, x: float, y) -> float | np.ndarray:
    """Density of the overshoot K_x at y > 0: the passage density shifted."""
    y_arr = np.asarray(y, dtype=float)
    val = overshoot_pdf(params, x, x + y_arr)
    val = np.where(y_arr > 0.0, val, 0.0)
    if np.isscalar(y):
        return float(val)
    return val


def kx_small_h_constant(params: StableParams, x: float) -> float:
    """Limit of P(K_x <= h) / h^(1 - alpha*rho) as h -> 0."""
    _require_no_creeping(params, "kx_small_h_constant")
    if x <= 0.0:
        raise ValueError(f"level x must be positive, got {x}")
    ar = params.alpha_rho
    return math.sin(math.pi * ar) / (math.pi * (1.0 - ar)) * x ** (ar - 1.0)


def asymptotic_small_lambda(
    params: StableParams,
    constants: AsymptoticConstants,
    x: float,
    mu: float,
    which: int,
) -> float:
    """Small-lambda coefficient (the expression divided by lambda^rho) of:

    1: P(supremum at exp(lambda) time <= x)
    2: integral of mu*exp(-mu*v)*P(sup <= v) over v > x
    3: E[exp(-mu * sup)]
    4: E[exp(-mu * sup); sup >= x]
    """
    _require_no_creeping(params, "asymptotic_small_lambda")
    ar = params.alpha_rho
    ks = constants.k_star
    if which == 1:
        return ks * x**ar
    if mu <= 0.0:
        raise ValueError(f"mu must be positive for selector {which}, got {mu}")
    if which == 2:
        return ks * upper_inc_gamma(1.0 + ar, mu * x) * mu ** (-ar)
    if which == 3:
        return ks * gamma_fn(1.0 + ar) * mu ** (-ar)
    if which == 4:
        return ks * ar * upper_inc_gamma(ar, mu * x) * mu ** (-ar)
    raise ValueError(f"selector must be one of 1..4, got {which}")
