"""Monte Carlo estimators for the joint Laplace transform of the passage
pair, the density of the supremum at an exponential time, the conditional
small-overshoot limits, and the exponentially-randomized level identity.

All estimators are pure functions over immutable sample buffers and
reduce in a fixed order, so single-threaded runs are bit-reproducible.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .laws import AsymptoticConstants, _require_no_creeping
from .params import StableParams
from .paths import PassageBatch

__all__ = [
    "Estimate",
    "CensoringError",
    "joint_lt_lhs",
    "joint_lt_rhs",
    "randomized_level_rhs",
    "f_lambda_density",
    "conditional_lt_limit",
    "limit_law_cdf",
]


class CensoringError(RuntimeError):
    """Censored fraction of a sample buffer exceeds the configured cap."""


@dataclass(frozen=True)
class Estimate:
    """Point estimate with a one-sigma standard error."""

    value: float
    stderr: float

    def agrees_with(self, other: "Estimate", n_sigma: float = 3.0) -> bool:
        combined = math.hypot(self.stderr, other.stderr)
        return abs(self.value - other.value) <= n_sigma * combined

    def discrepancy_sigmas(self, other: "Estimate") -> float:
        combined = math.hypot(self.stderr, other.stderr)
        if combined == 0.0:
            return 0.0 if self.value == other.value else math.inf
        return abs(self.value - other.value) / combined


def _check_censoring(batch: PassageBatch, cap: float) -> None:
    frac = batch.censored_fraction
    if frac > cap:
        raise CensoringError(
            f"censored fraction {frac:.4f} exceeds cap {cap}; "
            "increase max_time or the tail phase"
        )


def _mean_estimate(values: np.ndarray) -> Estimate:
    m = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    return Estimate(m, se)


def joint_lt_lhs(
    lam: float,
    mu: float,
    x: float,
    passage: PassageBatch,
    censoring_cap: float = 0.01,
) -> Estimate:
    """Sample mean of exp(-lam*T_x - mu*position) over non-censored paths."""
    if lam < 0.0 or mu < 0.0:
        raise ValueError("lam and mu must be nonnegative")
    _check_censoring(passage, censoring_cap)
    clean = passage.uncensored()
    return _mean_estimate(np.exp(-lam * clean.t - mu * clean.position))


def _ratio_estimate(num: np.ndarray, den: np.ndarray) -> Estimate:
    """Delta-method ratio of means of two jointly observed arrays."""
    n = num.size
    a, b = float(num.mean()), float(den.mean())
    if b <= 0.0:
        raise ValueError("denominator mean must be positive")
    r = a / b
    if n > 1:
        va = float(num.var(ddof=1))
        vb = float(den.var(ddof=1))
        cab = float(np.cov(num, den, ddof=1)[0, 1])
        var_r = (va / b**2 + a**2 * vb / b**4 - 2.0 * a * cab / b**3) / n
        se = math.sqrt(max(0.0, var_r))
    else:
        se = 0.0
    return Estimate(r, se)


def joint_lt_rhs(lam: float, mu: float, x: float, sup_exp_samples) -> Estimate:
    """Ratio E[exp(-mu*S) 1{S >= x}] / E[exp(-mu*S)] over supremum draws
    at exponential(lam) horizons (lam is fixed by how the samples were
    generated; it is accepted for interface symmetry).
    """
    s = np.asarray(sup_exp_samples, dtype=float)
    if s.size == 0:
        raise ValueError("empty supremum sample")
    if x <= 0.0:
        return Estimate(1.0, 0.0)
    den = np.exp(-mu * s)
    num = den * (s >= x)
    contributing = int(np.count_nonzero(s >= x))
    if contributing < 100:
        warnings.warn(
            f"joint_lt_rhs: only {contributing} samples reach level {x}; "
            "estimate is unreliable"
        )
    return _ratio_estimate(num, den)


def randomized_level_rhs(
    gamma: float, mu: float, sup_exp_samples
) -> Estimate:
    """gamma/(gamma-mu) * (1 - E[e^(-gamma*S)]/E[e^(-mu*S)]) with a
    delta-method standard error accounting for the shared sample.

    This is the closed-form side of the exponentially-randomized level
    identity; it requires gamma > mu.
    """
    if gamma <= mu:
        raise ValueError(
            f"randomized-level identity needs gamma > mu, got gamma={gamma}, mu={mu}"
        )
    s = np.asarray(sup_exp_samples, dtype=float)
    n = s.size
    u = np.exp(-gamma * s)
    v = np.exp(-mu * s)
    a, b = float(u.mean()), float(v.mean())
    pref = gamma / (gamma - mu)
    value = pref * (1.0 - a / b)
    # gradient of value in (a, b): (-pref/b, pref*a/b^2)
    cov = np.cov(u, v, ddof=1) / n
    g = np.array([-pref / b, pref * a / b**2])
    se = math.sqrt(max(0.0, float(g @ cov @ g)))
    return Estimate(value, se)


def f_lambda_density(
    params: StableParams,
    lam: float,
    x: float,
    t1_samples: PassageBatch,
    censoring_cap: float = 0.01,
) -> Estimate:
    """Density of the supremum at an exponential(lam) horizon, at x > 0,
    via lam*alpha/x * E[T_x exp(-lam*T_x)] and the scaling T_x = x^alpha T_1.

    Censored T_1 entries enter with their horizon time, which is exact
    whenever exp(-lam * x^alpha * max_time) is negligible.
    """
    if lam <= 0.0 or x <= 0.0:
        raise ValueError("lam and x must be positive")
    _check_censoring(t1_samples, censoring_cap)
    if t1_samples.x != 1.0:
        raise ValueError("t1_samples must be passage samples at level 1")
    a = params.alpha
    tx = x**a * t1_samples.t
    vals = lam * a / x * tx * np.exp(-lam * tx)
    return _mean_estimate(vals)


def conditional_lt_limit(
    params: StableParams,
    constants: AsymptoticConstants,
    x: float,
    lam: float,
    t1_samples: PassageBatch,
) -> Estimate:
    """Small-overshoot limit of E[exp(-lam*T_x) | K_x <= h]:
    x^(1-ar) * lam^(-rho) * f_lam(x) / (k* * ar).
    """
    _require_no_creeping(params, "conditional_lt_limit")
    f = f_lambda_density(params, lam, x, t1_samples)
    c = x ** (1.0 - params.alpha_rho) * lam ** (-params.rho) / (
        constants.k_star * params.alpha_rho
    )
    return Estimate(c * f.value, c * f.stderr)


def limit_law_cdf(
    params: StableParams,
    constants: AsymptoticConstants,
    x: float,
    t: float,
    tx_samples: PassageBatch,
    eps_fraction: float = 1e-4,
    return_raw: bool = False,
):
    """CDF of the small-overshoot limit variable at time t, estimated as
    sin(pi*rho)/(k*pi*rho) * x^(-ar) * E[T 1{T <= t} / (t - T)^(1-rho)].

    The integrand is singular at T = t; samples inside (t - eps, t] are
    excluded and replaced by an analytic correction that assumes the
    density of T is locally constant there.  Censored samples contribute
    zero, which is exact while t stays below the censoring horizon.
    The returned estimate is clipped to [0, 1]; pass return_raw=True to
    also get the unclipped (corrected) and raw (uncorrected) values.
    """
    _require_no_creeping(params, "limit_law_cdf")
    if t <= 0.0:
        raise ValueError(f"time t must be positive, got {t}")
    rho = params.rho
    horizon = float(tx_samples.t[tx_samples.censored].min()) if tx_samples.censored.any() else math.inf
    if t >= horizon:
        warnings.warn(
            f"limit_law_cdf: t={t} at or beyond the censoring horizon "
            f"{horizon}; the estimate is biased downward"
        )
    if rho < 0.5:
        near = np.count_nonzero(
            (~tx_samples.censored) & (t - tx_samples.t < 0.01 * t) & (tx_samples.t <= t)
        )
        if near > 0.01 * len(tx_samples):
            warnings.warn(
                "limit_law_cdf: rho < 1/2 with substantial near-singular mass; "
                "the naive estimator has unbounded variance"
            )
    pref = (
        math.sin(math.pi * rho)
        / (constants.k * math.pi * rho)
        * x ** (-params.alpha_rho)
    )
    ts = tx_samples.t
    cens = tx_samples.censored
    eps = eps_fraction * t
    gap = t - ts
    core = (~cens) & (ts <= t) & (gap >= eps)
    terms = np.zeros(ts.size)
    terms[core] = ts[core] / gap[core] ** (1.0 - rho)
    raw_terms = terms.copy()
    excluded = (~cens) & (ts <= t) & (gap < eps)
    raw_terms[excluded] = ts[excluded] / np.maximum(gap[excluded], 1e-300) ** (1.0 - rho)

    # local correction: density of T near t from a window of width 2*delta
    delta = max(eps, 0.01 * t)
    win = np.count_nonzero((~cens) & (np.abs(gap) <= delta))
    local_density = win / (2.0 * delta * ts.size)
    correction = pref * local_density * t * eps**rho / rho

    m = float(terms.mean())
    se = float(terms.std(ddof=1) / math.sqrt(terms.size)) if terms.size > 1 else 0.0
    corrected = pref * m + correction
    raw = pref * float(raw_terms.mean())
    est = Estimate(min(1.0, max(0.0, corrected)), pref * se)
    if return_raw:
        return est, corrected, raw
    return est
