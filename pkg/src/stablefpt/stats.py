"""Empirical-distribution machinery and the hypothesis tests the
verification experiments rely on: weighted ECDFs (for the exponentially
tilted measure), one- and two-sample Kolmogorov-Smirnov statistics,
log-log power-law fits, atom detection, and mean/bootstrap intervals.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .rng import RngStream

__all__ = [
    "EmpiricalDistribution",
    "FitResult",
    "ecdf",
    "ks_one_sample",
    "ks_two_sample",
    "kolmogorov_sf",
    "loglog_fit",
    "max_cdf_jump",
    "mean_ci",
    "bootstrap_ci",
]


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample set with optional importance weights summing to 1."""

    samples: np.ndarray
    weights: np.ndarray | None = None

    @classmethod
    def from_samples(cls, values, weights=None) -> "EmpiricalDistribution":
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            raise ValueError("empty sample set")
        order = np.argsort(values, kind="stable")
        values = values[order]
        if weights is None:
            return cls(samples=values, weights=None)
        weights = np.asarray(weights, dtype=float)[order]
        if weights.size != values.size:
            raise ValueError("weights length must match samples")
        if np.any(weights < 0.0):
            raise ValueError("weights must be nonnegative")
        total = weights.sum()
        if total <= 0.0:
            raise ValueError("weights must have positive total mass")
        return cls(samples=values, weights=weights / total)

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def is_weighted(self) -> bool:
        return self.weights is not None


def ecdf(dist: EmpiricalDistribution, y) -> float | np.ndarray:
    """Right-continuous (weighted) fraction of samples <= y."""
    if dist.n == 0:
        raise ValueError("empty distribution")
    counts = np.searchsorted(dist.samples, np.asarray(y, dtype=float), side="right")
    if dist.weights is None:
        val = counts / dist.n
    else:
        cw = np.concatenate([[0.0], np.cumsum(dist.weights)])
        val = cw[counts]
    if np.isscalar(y):
        return float(val)
    return val


def _require_unweighted(dist: EmpiricalDistribution, what: str) -> None:
    if dist.is_weighted:
        raise ValueError(f"{what} is defined for unweighted samples only")


def ks_one_sample(dist: EmpiricalDistribution, cdf) -> float:
    """Sup-distance between the ECDF and a reference CDF.

    Both one-sided gaps are evaluated at every distinct sample point, so
    tied floats are handled correctly.
    """
    _require_unweighted(dist, "ks_one_sample")
    xs, counts = np.unique(dist.samples, return_counts=True)
    hi = np.cumsum(counts) / dist.n
    lo = hi - counts / dist.n
    f = np.asarray(cdf(xs), dtype=float)
    return float(max(np.max(hi - f), np.max(f - lo)))


def kolmogorov_sf(x: float, terms: int = 100) -> float:
    """Asymptotic Kolmogorov survival function Q(x) = P(sup > x)."""
    if x <= 0.0:
        return 1.0
    total = 0.0
    for k in range(1, terms + 1):
        term = 2.0 * (-1.0) ** (k - 1) * math.exp(-2.0 * k * k * x * x)
        total += term
        if abs(term) < 1e-16:
            break
    return min(1.0, max(0.0, total))


def ks_two_sample(
    a: EmpiricalDistribution, b: EmpiricalDistribution
) -> tuple[float, float]:
    """Two-sample KS statistic and its asymptotic p-value."""
    _require_unweighted(a, "ks_two_sample")
    _require_unweighted(b, "ks_two_sample")
    if a.n < 50 or b.n < 50:
        raise ValueError(f"need at least 50 samples per side, got {a.n} and {b.n}")
    grid = np.concatenate([a.samples, b.samples])
    fa = np.searchsorted(a.samples, grid, side="right") / a.n
    fb = np.searchsorted(b.samples, grid, side="right") / b.n
    d = float(np.max(np.abs(fa - fb)))
    en = math.sqrt(a.n * b.n / (a.n + b.n))
    return d, kolmogorov_sf(en * d)


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    stderr_slope: float
    r_squared: float


def loglog_fit(points) -> FitResult:
    """Least-squares fit of log p against log x for power-law data.

    Zero or negative probabilities are dropped with a warning; fewer than
    three usable points is an error.
    """
    pts = [(float(x), float(p)) for x, p in points]
    if any(x <= 0.0 for x, _ in pts):
        raise ValueError("x values must be positive")
    dropped = sum(1 for _, p in pts if p <= 0.0)
    if dropped:
        warnings.warn(f"loglog_fit: dropped {dropped} nonpositive probabilities")
    pts = [(x, p) for x, p in pts if p > 0.0]
    if len(pts) < 3:
        raise ValueError("need at least 3 usable points for a log-log fit")
    lx = np.log([x for x, _ in pts])
    lp = np.log([p for _, p in pts])
    n = lx.size
    xm, pm = lx.mean(), lp.mean()
    sxx = np.sum((lx - xm) ** 2)
    slope = float(np.sum((lx - xm) * (lp - pm)) / sxx)
    intercept = float(pm - slope * xm)
    resid = lp - (intercept + slope * lx)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((lp - pm) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    if n > 2:
        stderr = math.sqrt(ss_res / (n - 2) / sxx)
    else:
        stderr = 0.0
    return FitResult(
        slope=slope, intercept=intercept, stderr_slope=stderr, r_squared=r2
    )


def max_cdf_jump(dist: EmpiricalDistribution) -> float:
    """Largest tie multiplicity divided by N (atoms at float equality)."""
    _require_unweighted(dist, "max_cdf_jump")
    _, counts = np.unique(dist.samples, return_counts=True)
    return float(counts.max()) / dist.n


def mean_ci(values, weights=None) -> tuple[float, float, float]:
    """(mean, stderr, 95% halfwidth) of a sample, optionally weighted.

    Weighted form treats the normalized weights as fixed, which is the
    delta-method variance of the weighted mean.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("empty sample")
    if weights is None:
        m = float(values.mean())
        if values.size == 1:
            return m, 0.0, 0.0
        se = float(values.std(ddof=1) / math.sqrt(values.size))
        return m, se, 1.96 * se
    w = np.asarray(weights, dtype=float)
    w = w / w.sum()
    m = float(np.sum(w * values))
    se = float(math.sqrt(np.sum((w * (values - m)) ** 2)))
    return m, se, 1.96 * se


def bootstrap_ci(
    values,
    rng: RngStream,
    stat=np.mean,
    n_boot: int = 200,
    level: float = 0.95,
) -> tuple[float, float]:
    """Percentile bootstrap interval for a statistic of an i.i.d. sample."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if n == 0:
        raise ValueError("empty sample")
    idx = rng.generator.integers(0, n, size=(n_boot, n))
    stats = np.array([stat(values[row]) for row in idx])
    lo = (1.0 - level) / 2.0
    return (
        float(np.quantile(stats, lo)),
        float(np.quantile(stats, 1.0 - lo)),
    )
