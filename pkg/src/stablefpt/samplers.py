"""Elementary random samplers: stable increments, exponentials, Beta laws,
and the exact Beta-ratio sampler for the position at first passage.

Stable draws use the Chambers-Mallows-Stuck transform in the S1
parameterization (strictly stable for alpha in (1, 2], location 0).
All samplers accept an optional ``size`` and then return an ndarray;
without it they return a Python float.
"""

from __future__ import annotations

import math

import numpy as np

from .params import StableParams
from .rng import RngStream

__all__ = [
    "sample_stable_increment",
    "sample_exponential",
    "sample_beta",
    "sample_overshoot_exact",
    "standard_stable",
]

_HALF_PI = math.pi / 2.0


def _cms_numpy(u, w, alpha, beta):
    # u uniform on (-pi/2, pi/2), w standard exponential
    zeta = -beta * math.tan(_HALF_PI * alpha)
    theta0 = math.atan(-zeta) / alpha
    prefac = (1.0 + zeta * zeta) ** (1.0 / (2.0 * alpha))
    at = alpha * (u + theta0)
    x = (
        prefac
        * np.sin(at)
        / np.cos(u) ** (1.0 / alpha)
        * (np.cos(u - at) / w) ** ((1.0 - alpha) / alpha)
    )
    return x


try:  # optional hot path; the numpy fallback is exact but slower
    import numba

    @numba.njit(cache=True, parallel=True)
    def _cms_numba(u, w, alpha, beta):  # pragma: no cover - jitted
        zeta = -beta * math.tan(_HALF_PI * alpha)
        theta0 = math.atan(-zeta) / alpha
        prefac = (1.0 + zeta * zeta) ** (1.0 / (2.0 * alpha))
        inv_alpha = 1.0 / alpha
        expo = (1.0 - alpha) * inv_alpha
        out = np.empty_like(u)
        for i in numba.prange(u.size):
            at = alpha * (u[i] + theta0)
            out[i] = (
                prefac
                * math.sin(at)
                * math.cos(u[i]) ** (-inv_alpha)
                * (math.cos(u[i] - at) / w[i]) ** expo
            )
        return out

    _HAVE_NUMBA = True
except Exception:  # pragma: no cover
    _HAVE_NUMBA = False


def standard_stable(params: StableParams, rng: RngStream, size=None):
    """Draw from the standard (unit scale, time 1) stable law."""
    scalar = size is None
    n = 1 if scalar else size
    u = rng.uniform(-_HALF_PI, _HALF_PI, n)
    w = rng.standard_exponential(n)
    u = np.atleast_1d(np.asarray(u, dtype=np.float64))
    w = np.atleast_1d(np.asarray(w, dtype=np.float64))
    shape = u.shape
    if _HAVE_NUMBA and u.size >= 4096:
        x = _cms_numba(u.ravel(), w.ravel(), params.alpha, params.skewness)
        x = x.reshape(shape)
    else:
        x = _cms_numpy(u, w, params.alpha, params.skewness)
    if scalar:
        return float(x[0])
    return x


def sample_stable_increment(params: StableParams, dt: float, rng: RngStream, size=None):
    """One increment X_dt; by self-similarity dt**(1/alpha) * X_1."""
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    fac = params.scale * dt ** (1.0 / params.alpha)
    x = standard_stable(params, rng, size)
    return fac * x


def sample_exponential(gamma: float, rng: RngStream, size=None):
    """Exponential draw with rate gamma (mean 1/gamma)."""
    if gamma <= 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    x = rng.standard_exponential(size)
    if size is None:
        return float(x) / gamma
    return x / gamma


def sample_beta(a: float, b: float, rng: RngStream, size=None):
    """Beta(a, b) draw on (0, 1)."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError(f"Beta parameters must be positive, got {(a, b)}")
    x = rng.beta(a, b, size)
    if size is None:
        return float(x)
    return x


def sample_overshoot_exact(params: StableParams, x: float, rng: RngStream, size=None):
    """Exact draw of the position at first passage over level x.

    The position equals x / Beta(alpha*rho, 1 - alpha*rho) in law; this
    requires alpha*rho < 1 (the spectrally negative case creeps and is
    excluded).
    """
    if x <= 0.0:
        raise ValueError(f"level x must be positive, got {x}")
    ar = params.alpha_rho
    if ar >= 1.0 - 1e-12:
        raise ValueError(
            "exact passage-position sampler requires alpha*rho < 1; "
            f"alpha*rho = {ar} (spectrally negative boundary creeps)"
        )
    b = sample_beta(ar, 1.0 - ar, rng, size)
    return x / b
