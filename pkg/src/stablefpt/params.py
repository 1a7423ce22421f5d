"""Process parameterization for strictly stable laws with index in (1, 2].

The process is pinned down by the pair (alpha, rho), where rho is the
positivity parameter P(X_1 >= 0).  The classical skewness beta of the
S1 parameterization is derived from rho via

    rho = 1/2 + arctan(beta * tan(pi*alpha/2)) / (pi*alpha),

so beta = 1 corresponds to rho = 1 - 1/alpha (spectrally positive) and
beta = -1 to rho = 1/alpha (spectrally negative).

Scale convention: scale = 1 means the standard S1 stable law with unit
scale parameter.  At alpha = 2 this is N(0, 2), i.e. X_1 has variance 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["StableParams", "make_params", "rho_to_skewness", "skewness_to_rho"]


def rho_to_skewness(alpha: float, rho: float) -> float:
    """Invert the positivity relation to get the S1 skewness beta."""
    t = math.tan(math.pi * alpha / 2.0)
    phi = math.pi * alpha * (rho - 0.5)
    # phi lies in [alpha*pi/2 - pi, pi - alpha*pi/2], the range of
    # -arctan... guard endpoints against rounding past +-1.
    beta = math.tan(phi) / t
    return min(1.0, max(-1.0, beta))


def skewness_to_rho(alpha: float, beta: float) -> float:
    """Positivity parameter P(X_1 >= 0) of the S1 stable law."""
    t = math.tan(math.pi * alpha / 2.0)
    return 0.5 + math.atan(beta * t) / (math.pi * alpha)


@dataclass(frozen=True)
class StableParams:
    """Validated (alpha, rho) pair with derived skewness; immutable."""

    alpha: float
    rho: float
    skewness: float
    scale: float = 1.0

    @property
    def alpha_rho(self) -> float:
        return self.alpha * self.rho

    @property
    def spectrally_negative(self) -> bool:
        """No positive jumps: rho = 1/alpha, equivalently alpha*rho = 1."""
        return math.isclose(self.alpha_rho, 1.0, rel_tol=0.0, abs_tol=1e-12)

    @property
    def spectrally_positive(self) -> bool:
        """No negative jumps: rho = 1 - 1/alpha."""
        return math.isclose(self.rho, 1.0 - 1.0 / self.alpha, abs_tol=1e-12)


def make_params(alpha: float, rho: float, scale: float = 1.0) -> StableParams:
    """Build validated StableParams.

    alpha must lie in (1, 2]; rho must lie in [1 - 1/alpha, 1/alpha].
    At alpha = 2 the only admissible value is rho = 1/2.
    """
    if not (1.0 < alpha <= 2.0):
        raise ValueError(f"alpha must lie in (1, 2], got {alpha}")
    lo, hi = 1.0 - 1.0 / alpha, 1.0 / alpha
    # tolerate float fuzz at the spectral boundaries
    if rho < lo - 1e-12 or rho > hi + 1e-12:
        raise ValueError(
            f"rho={rho} outside the admissible interval "
            f"[1 - 1/alpha, 1/alpha] = [{lo}, {hi}] for alpha={alpha}"
        )
    rho = min(hi, max(lo, rho))
    if scale <= 0.0:
        raise ValueError(f"scale must be positive, got {scale}")
    if alpha == 2.0:
        beta = 0.0
    else:
        beta = rho_to_skewness(alpha, rho)
    return StableParams(alpha=alpha, rho=rho, skewness=beta, scale=scale)
