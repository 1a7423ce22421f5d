"""Random-walk skeleton simulation of the stable process and extraction of
first-passage functionals (passage time, position, overshoot) and running
suprema at fixed or exponential horizons.

The engine marches whole batches of paths in lockstep, drawing increment
blocks and compacting finished paths out of the working set, so the cost
per path is dominated by the number of steps actually survived.

Discretization notes
--------------------
* The skeleton supremum is biased downward, the skeleton overshoot upward;
  the dt ladder quantifies (not removes) this bias.
* An optional coarse tail phase (``tail_dt`` after ``tail_switch``)
  cheapens the heavy right tail of passage times.  It is meant for
  estimators that weight the tail by exp(-lambda*t); overshoot-sensitive
  work should keep a single fine dt.
* Passage times land on the step grid; by default the reported time is
  smeared uniformly over the crossing step, which removes the artificial
  grid atoms while never moving a time by more than one step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import StableParams
from .rng import RngStream
from .samplers import sample_exponential, standard_stable

__all__ = [
    "SkeletonConfig",
    "PassageSample",
    "SupremumSample",
    "PassageBatch",
    "AcceptanceFloorError",
    "first_passage",
    "first_passage_batch",
    "supremum_at",
    "supremum_at_exp",
    "supremum_fixed_batch",
    "supremum_exp_batch",
    "sample_conditioned_passage",
    "conditioned_passage_batch",
]

# increments drawn per block, bounding working memory (~64 MB of f64)
_BLOCK_ELEMS = 4_000_000


class AcceptanceFloorError(RuntimeError):
    """Rejection sampling fell below the configured acceptance floor."""


@dataclass(frozen=True)
class SkeletonConfig:
    """Step size, horizon, and bias-ladder for the walk skeleton.

    max_time=None resolves to 1e3 * x**alpha at the point of use.
    """

    dt: float = 1e-3
    max_time: float | None = None
    dt_ladder: tuple[float, ...] = (1e-2, 1e-3, 1e-4)
    tail_dt: float | None = None
    tail_switch: float | None = None
    jitter: bool = True

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.max_time is not None and self.max_time < self.dt:
            raise ValueError("max_time must be at least dt")
        ladder = tuple(self.dt_ladder)
        if any(d <= 0.0 for d in ladder):
            raise ValueError("dt_ladder entries must be positive")
        if any(a <= b for a, b in zip(ladder, ladder[1:])):
            raise ValueError("dt_ladder must be strictly decreasing")
        if (self.tail_dt is None) != (self.tail_switch is None):
            raise ValueError("tail_dt and tail_switch must be set together")
        if self.tail_dt is not None and self.tail_dt < self.dt:
            raise ValueError("tail_dt is a coarsening; must be >= dt")

    def horizon(self, x: float, alpha: float) -> float:
        if self.max_time is not None:
            return self.max_time
        return 1e3 * x**alpha


@dataclass(frozen=True)
class PassageSample:
    """One realization of (T_x, X_{T_x}, K_x) on the skeleton."""

    t_x: float
    position: float
    overshoot: float
    censored: bool
    dt_used: float


@dataclass(frozen=True)
class SupremumSample:
    value: float
    horizon: float


@dataclass
class PassageBatch:
    """Column-wise buffer of passage samples.

    ``x`` is either a common level or a per-path level array (used by the
    exponentially-randomized-level experiment).
    """

    t: np.ndarray
    position: np.ndarray
    censored: np.ndarray
    dt_used: np.ndarray
    x: float | np.ndarray
    attempts: int = 0

    @property
    def overshoot(self) -> np.ndarray:
        return self.position - self.x

    @property
    def censored_fraction(self) -> float:
        return float(self.censored.mean()) if self.t.size else 0.0

    def uncensored(self) -> "PassageBatch":
        m = ~self.censored
        x = self.x[m] if isinstance(self.x, np.ndarray) else self.x
        return PassageBatch(
            t=self.t[m],
            position=self.position[m],
            censored=self.censored[m],
            dt_used=self.dt_used[m],
            x=x,
            attempts=self.attempts,
        )

    def __len__(self) -> int:
        return self.t.size


def _increment_factor(params: StableParams, dt: float) -> float:
    return params.scale * dt ** (1.0 / params.alpha)


def first_passage_batch(
    params: StableParams,
    x,
    cfg: SkeletonConfig,
    rng: RngStream,
    n: int,
) -> PassageBatch:
    """Simulate n independent first passages over level x (scalar or one
    level per path).

    Returns sample columns; censored entries carry t = max_time and
    position/overshoot NaN.
    """
    scalar_x = np.isscalar(x)
    x_arr = np.broadcast_to(np.asarray(x, dtype=float), (n,)).copy()
    if np.any(x_arr <= 0.0):
        raise ValueError("levels must be positive")
    max_time = cfg.horizon(float(x_arr.max()), params.alpha)

    out_t = np.full(n, max_time)
    out_pos = np.full(n, np.nan)
    out_cens = np.ones(n, dtype=bool)
    out_dt = np.full(n, cfg.dt)

    phases = []
    if cfg.tail_dt is not None and cfg.tail_switch is not None and cfg.tail_switch < max_time:
        phases.append((cfg.dt, cfg.tail_switch))
        phases.append((cfg.tail_dt, max_time))
    else:
        phases.append((cfg.dt, max_time))

    idx = np.arange(n)
    pos = np.zeros(n)
    t_now = 0.0
    for pdt, pend in phases:
        nsteps = max(0, int(round((pend - t_now) / pdt)))
        done = 0
        while done < nsteps and idx.size:
            b = max(1, min(nsteps - done, _BLOCK_ELEMS // max(1, idx.size)))
            inc = standard_stable(params, rng, (idx.size, b))
            inc *= _increment_factor(params, pdt)
            np.cumsum(inc, axis=1, out=inc)
            cum = inc
            cum += pos[:, None]
            hit = cum >= x_arr[idx, None]
            anyhit = hit.any(axis=1)
            if anyhit.any():
                rows = np.nonzero(anyhit)[0]
                k = hit[rows].argmax(axis=1)
                tt = t_now + done * pdt + (k + 1) * pdt
                if cfg.jitter:
                    tt = tt - rng.uniform(0.0, 1.0, rows.size) * pdt
                oi = idx[rows]
                out_t[oi] = tt
                out_pos[oi] = cum[rows, k]
                out_cens[oi] = False
                out_dt[oi] = pdt
                keep = ~anyhit
                idx = idx[keep]
                pos = cum[keep, -1]
            else:
                pos = cum[:, -1]
            done += b
        t_now += nsteps * pdt
    return PassageBatch(
        t=out_t,
        position=out_pos,
        censored=out_cens,
        dt_used=out_dt,
        x=float(x_arr[0]) if scalar_x else x_arr,
        attempts=n,
    )


def first_passage(
    params: StableParams, x: float, cfg: SkeletonConfig, rng: RngStream
) -> PassageSample:
    """Walk the skeleton to the first grid point at or above level x."""
    batch = first_passage_batch(params, x, cfg, rng, 1)
    censored = bool(batch.censored[0])
    pos = float(batch.position[0])
    return PassageSample(
        t_x=float(batch.t[0]),
        position=pos,
        overshoot=pos - x if not censored else math.nan,
        censored=censored,
        dt_used=float(batch.dt_used[0]),
    )


def supremum_fixed_batch(
    params: StableParams,
    t: float,
    dt: float,
    rng: RngStream,
    n: int,
    chunk: int = 4096,
) -> np.ndarray:
    """Running maxima of the skeleton on [0, t] for n independent paths.

    The max includes the starting point 0, matching S_t >= 0.
    """
    if t <= 0.0:
        raise ValueError(f"horizon t must be positive, got {t}")
    nsteps = max(1, int(round(t / dt)))
    fac = _increment_factor(params, dt)
    out = np.empty(n)
    for start in range(0, n, chunk):
        m = min(chunk, n - start)
        pos = np.zeros(m)
        smax = np.zeros(m)
        done = 0
        while done < nsteps:
            b = max(1, min(nsteps - done, _BLOCK_ELEMS // m))
            inc = standard_stable(params, rng, (m, b))
            inc *= fac
            np.cumsum(inc, axis=1, out=inc)
            cum = inc
            cum += pos[:, None]
            np.maximum(smax, cum.max(axis=1), out=smax)
            pos = cum[:, -1]
            done += b
        out[start : start + m] = smax
    return out


def supremum_exp_batch(
    params: StableParams,
    lam: float,
    dt: float,
    rng: RngStream,
    n: int,
) -> np.ndarray:
    """Skeleton suprema at independent exponential(lam) horizons."""
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    horizons = sample_exponential(lam, rng, n)
    nsteps = np.floor(horizons / dt).astype(np.int64)
    fac = _increment_factor(params, dt)

    out = np.zeros(n)
    idx = np.nonzero(nsteps > 0)[0]
    pos = np.zeros(idx.size)
    smax = np.zeros(idx.size)
    rem = nsteps[idx]
    while idx.size:
        b = max(1, min(int(rem.max()), _BLOCK_ELEMS // idx.size))
        inc = standard_stable(params, rng, (idx.size, b))
        inc *= fac
        np.cumsum(inc, axis=1, out=inc)
        cum = inc
        cum += pos[:, None]
        valid = np.arange(b)[None, :] < rem[:, None]
        blockmax = np.where(valid, cum, -np.inf).max(axis=1)
        np.maximum(smax, blockmax, out=smax)
        finishing = rem <= b
        out[idx[finishing]] = smax[finishing]
        keep = ~finishing
        idx = idx[keep]
        pos = cum[keep, -1]
        smax = smax[keep]
        rem = rem[keep] - b
    return out


def supremum_at(
    params: StableParams, t: float, cfg: SkeletonConfig, rng: RngStream
) -> SupremumSample:
    val = supremum_fixed_batch(params, t, cfg.dt, rng, 1)
    return SupremumSample(value=float(val[0]), horizon=t)


def supremum_at_exp(
    params: StableParams, lam: float, cfg: SkeletonConfig, rng: RngStream
) -> SupremumSample:
    e = sample_exponential(lam, rng)
    val = supremum_fixed_batch(params, max(e, cfg.dt), cfg.dt, rng, 1)
    return SupremumSample(value=float(val[0]) if e >= cfg.dt else 0.0, horizon=e)


def conditioned_passage_batch(
    params: StableParams,
    x: float,
    h: float,
    cfg: SkeletonConfig,
    rng: RngStream,
    n_accept: int,
    acceptance_floor: float = 1e-6,
    attempt_batch: int = 2000,
) -> PassageBatch:
    """Rejection sampling of passage samples conditioned on overshoot <= h.

    Censored attempts count as rejections (their overshoot is unknown).
    Aborts once the running acceptance rate drops below the floor, which
    signals h too small for the configured dt.
    """
    if h <= 0.0:
        raise ValueError(f"overshoot window h must be positive, got {h}")
    if params.alpha_rho >= 1.0 - 1e-12:
        raise ValueError(
            "conditioned sampling requires alpha*rho < 1; the spectrally "
            "negative boundary has vanishing overshoot already"
        )
    t_acc, pos_acc, dt_acc = [], [], []
    accepted = 0
    attempts = 0
    while accepted < n_accept:
        batch = first_passage_batch(params, x, cfg, rng, attempt_batch)
        attempts += attempt_batch
        ok = (~batch.censored) & (batch.position - x <= h)
        accepted += int(ok.sum())
        t_acc.append(batch.t[ok])
        pos_acc.append(batch.position[ok])
        dt_acc.append(batch.dt_used[ok])
        if attempts >= 100 * attempt_batch and accepted < acceptance_floor * attempts:
            raise AcceptanceFloorError(
                f"acceptance rate {accepted}/{attempts} below floor "
                f"{acceptance_floor}; h={h} too small for dt={cfg.dt}"
            )
    t = np.concatenate(t_acc)[:n_accept]
    pos = np.concatenate(pos_acc)[:n_accept]
    dts = np.concatenate(dt_acc)[:n_accept]
    return PassageBatch(
        t=t,
        position=pos,
        censored=np.zeros(n_accept, dtype=bool),
        dt_used=dts,
        x=x,
        attempts=attempts,
    )


def conditioned_passage_ladder(
    params: StableParams,
    x: float,
    hs,
    cfg: SkeletonConfig,
    rng: RngStream,
    n_accept: int,
    acceptance_floor: float = 1e-6,
    attempt_batch: int = 2000,
) -> dict:
    """Coupled rejection sampling over a ladder of overshoot windows.

    Every window filters the same attempt stream, so a path accepted for a
    small window is accepted for every larger one (the events are nested).
    That coupling is the point: when the windows' conditional laws are
    compared afterwards, their sampling errors are common-random-number
    correlated instead of independent, so the comparison resolves much
    smaller differences.  It is also cheaper than one independent run per
    window, since the rarest window alone dictates the attempt count.
    """
    hs = sorted(set(float(h) for h in np.atleast_1d(hs)))
    if not hs:
        raise ValueError("need at least one overshoot window")
    if hs[0] <= 0.0:
        raise ValueError(f"overshoot windows must be positive, got {hs[0]}")
    if params.alpha_rho >= 1.0 - 1e-12:
        raise ValueError(
            "conditioned sampling requires alpha*rho < 1; the spectrally "
            "negative boundary has vanishing overshoot already"
        )
    acc = {h: {"t": [], "pos": [], "dt": [], "n": 0} for h in hs}
    attempts = 0
    while min(a["n"] for a in acc.values()) < n_accept:
        batch = first_passage_batch(params, x, cfg, rng, attempt_batch)
        attempts += attempt_batch
        over = batch.position - x
        for h, a in acc.items():
            if a["n"] >= n_accept:
                continue
            ok = (~batch.censored) & (over <= h)
            a["n"] += int(ok.sum())
            a["t"].append(batch.t[ok])
            a["pos"].append(batch.position[ok])
            a["dt"].append(batch.dt_used[ok])
        worst = min(a["n"] for a in acc.values())
        if attempts >= 100 * attempt_batch and worst < acceptance_floor * attempts:
            raise AcceptanceFloorError(
                f"acceptance rate {worst}/{attempts} below floor "
                f"{acceptance_floor}; h={hs[0]} too small for dt={cfg.dt}"
            )
    out = {}
    for h, a in acc.items():
        out[h] = PassageBatch(
            t=np.concatenate(a["t"])[:n_accept],
            position=np.concatenate(a["pos"])[:n_accept],
            censored=np.zeros(n_accept, dtype=bool),
            dt_used=np.concatenate(a["dt"])[:n_accept],
            x=x,
            attempts=attempts,
        )
    return out


def sample_conditioned_passage(
    params: StableParams,
    x: float,
    h: float,
    cfg: SkeletonConfig,
    rng: RngStream,
    acceptance_floor: float = 1e-6,
) -> PassageSample:
    """First accepted passage sample with overshoot <= h."""
    batch = conditioned_passage_batch(
        params, x, h, cfg, rng, 1, acceptance_floor=acceptance_floor, attempt_batch=64
    )
    pos = float(batch.position[0])
    return PassageSample(
        t_x=float(batch.t[0]),
        position=pos,
        overshoot=pos - x,
        censored=False,
        dt_used=float(batch.dt_used[0]),
    )
