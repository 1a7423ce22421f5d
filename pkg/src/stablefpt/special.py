"""Special-function kernel: regularized incomplete beta, gamma, and the
upper incomplete gamma integral.

The incomplete beta uses the Lentz continued fraction with the usual
symmetry split at z = (a+1)/(a+b+2); the incomplete gamma switches
between the lower series and the upper continued fraction at y = s+1.
Both converge uniformly to rel_tol over the parameter ranges used here,
including a or b below 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "SpecialFnTolerances",
    "ConvergenceError",
    "gamma_fn",
    "reg_inc_beta",
    "upper_inc_gamma",
]

_TINY = 1e-300


class ConvergenceError(RuntimeError):
    """A continued fraction or series failed to converge within max_iter."""


@dataclass(frozen=True)
class SpecialFnTolerances:
    rel_tol: float = 1e-12
    max_iter: int = 500

    def __post_init__(self):
        if self.rel_tol <= 0.0:
            raise ValueError("rel_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


_DEFAULT_TOL = SpecialFnTolerances()


def gamma_fn(s: float) -> float:
    """Gamma function for s > 0."""
    if s <= 0.0:
        raise ValueError(f"gamma_fn requires s > 0, got {s}")
    return math.gamma(s)


def _betacf(a: float, b: float, z: float, tol: SpecialFnTolerances) -> float:
    """Lentz evaluation of the incomplete beta continued fraction."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * z / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    f = d
    for m in range(1, tol.max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * z / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        f *= d * c
        aa = -(a + m) * (qab + m) * z / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        f *= delta
        if abs(delta - 1.0) < tol.rel_tol:
            return f
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge for "
        f"(a={a}, b={b}, z={z}) in {tol.max_iter} iterations"
    )


def reg_inc_beta(
    a: float, b: float, z: float, tol: SpecialFnTolerances = _DEFAULT_TOL
) -> float:
    """Regularized incomplete beta I_z(a, b)."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError(f"parameters must be positive, got (a={a}, b={b})")
    if not (0.0 <= z <= 1.0):
        raise ValueError(f"z must lie in [0, 1], got {z}")
    if z == 0.0:
        return 0.0
    if z == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(z)
        + b * math.log1p(-z)
    )
    front = math.exp(ln_front)
    if z < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, z, tol) / a
    return 1.0 - front * _betacf(b, a, 1.0 - z, tol) / b


def _lower_gamma_series(s: float, y: float, tol: SpecialFnTolerances) -> float:
    """Series for the regularized lower incomplete gamma P(s, y), y <= s+1."""
    term = 1.0 / s
    total = term
    ap = s
    for _ in range(tol.max_iter):
        ap += 1.0
        term *= y / ap
        total += term
        if abs(term) < abs(total) * tol.rel_tol:
            return total * math.exp(-y + s * math.log(y) - math.lgamma(s))
    raise ConvergenceError(
        f"lower incomplete gamma series did not converge for (s={s}, y={y})"
    )


def _upper_gamma_cf(s: float, y: float, tol: SpecialFnTolerances) -> float:
    """Continued fraction for the regularized upper gamma Q(s, y), y > s+1."""
    b = y + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    f = d
    for i in range(1, tol.max_iter + 1):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        f *= delta
        if abs(delta - 1.0) < tol.rel_tol:
            return f * math.exp(-y + s * math.log(y) - math.lgamma(s))
    raise ConvergenceError(
        f"upper incomplete gamma continued fraction did not converge for "
        f"(s={s}, y={y})"
    )


def upper_inc_gamma(
    s: float, y: float, tol: SpecialFnTolerances = _DEFAULT_TOL
) -> float:
    """Upper incomplete gamma integral of exp(-u) u^(s-1) from y to infinity."""
    if s <= 0.0:
        raise ValueError(f"upper_inc_gamma requires s > 0, got {s}")
    if y < 0.0:
        raise ValueError(f"lower limit must be nonnegative, got {y}")
    g = math.gamma(s)
    if y == 0.0:
        return g
    if y < s + 1.0:
        return g * (1.0 - _lower_gamma_series(s, y, tol))
    return g * _upper_gamma_cf(s, y, tol)
