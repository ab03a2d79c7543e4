"""First-passage times of drifted Brownian motion X(t) = nu t + sigma W(t).

The hitting time of a barrier a > 0 with nu > 0 is IG(a/nu, a^2/sigma^2).
``simulate_fpt`` produces that law from Euler paths, independently of the
closed-form density, so the two can be checked against each other.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import distribution as igd
from ._random import check_seed, make_rng
from .distribution import IgParams
from .exceptions import CensoredSample, EmptySample, InputError, InvalidStep, NonPositiveDrift
from .inference import KsResult, ks_test

# Upper bound on (live paths x steps) materialized per block.
_BLOCK_ELEMENTS = 1 << 21
CENSOR_TAIL = 1e-6


@dataclass(frozen=True)
class DriftParams:
    nu: float
    sigma: float
    barrier: float

    def __post_init__(self):
        if not math.isfinite(self.nu):
            raise InputError("drift must be finite")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise InputError(f"sigma must be > 0, got {self.sigma}")
        if not (math.isfinite(self.barrier) and self.barrier > 0):
            raise InputError(f"barrier must be > 0, got {self.barrier}")


def fpt_to_ig_params(p):
    """IG parameters of the hitting time: mu = a/nu, lam = a^2/sigma^2."""
    if not p.nu > 0:
        raise NonPositiveDrift(f"drift must be > 0 for a proper hitting law, got {p.nu}")
    return IgParams(p.barrier / p.nu, p.barrier**2 / p.sigma**2)


@dataclass(frozen=True)
class FptSample:
    hits: np.ndarray = field(repr=False)
    censored: int
    dt: float
    n_paths: int
    seed: int
    max_time: float
    params: DriftParams
    bridge_correction: bool = True

    def summary(self):
        h = self.hits
        return {
            "n_paths": self.n_paths,
            "n_hits": int(h.size),
            "censored": self.censored,
            "mean": float(h.mean()) if h.size else math.nan,
            "variance": float(h.var(ddof=1)) if h.size > 1 else math.nan,
            "dt": self.dt,
            "max_time": self.max_time,
            "bridge_correction": self.bridge_correction,
        }


def default_max_time(p):
    """Horizon beyond which a fraction CENSOR_TAIL of the hitting law lies."""
    return igd.quantile(1.0 - CENSOR_TAIL, fpt_to_ig_params(p))


def simulate_fpt(p, dt=1e-4, max_time=None, n_paths=10_000, seed=0, bridge_correction=True):
    """Simulate ``n_paths`` Euler paths until they reach the barrier.

    With ``bridge_correction`` a step whose endpoints both sit below the
    barrier still counts as a crossing with the Brownian-bridge probability
    exp(-2 (a - x0)(a - x1) / (sigma^2 dt)), and any crossing time is drawn
    uniformly inside its step. Without it, a hit is recorded at the end of
    the first step that lands on or above the barrier.
    """
    if max_time is None:
        max_time = default_max_time(p)
    dt, max_time, n_paths = float(dt), float(max_time), int(n_paths)
    if not (dt > 0 and math.isfinite(dt)) or not dt < max_time:
        raise InvalidStep(f"need 0 < dt < max_time, got dt={dt}, max_time={max_time}")
    if n_paths < 1:
        raise InputError(f"n_paths must be >= 1, got {n_paths}")
    seed = check_seed(seed)
    rng = make_rng(seed)

    a = p.barrier
    n_steps = int(math.floor(max_time / dt * (1.0 + 1e-12)))
    drift, vol = p.nu * dt, p.sigma * math.sqrt(dt)
    bridge_rate = 2.0 / (p.sigma**2 * dt)

    pos = np.zeros(n_paths)
    times = np.full(n_paths, np.nan)
    alive = np.arange(n_paths)
    step = 0
    while alive.size and step < n_steps:
        m = min(n_steps - step, max(8, _BLOCK_ELEMENTS // alive.size))
        start = pos[alive]
        path = start[:, None] + np.cumsum(drift + vol * rng.standard_normal((alive.size, m)), axis=1)
        crossed = path >= a
        if bridge_correction:
            gap0 = a - np.concatenate([start[:, None], path[:, :-1]], axis=1)
            gap1 = a - path
            prob = np.exp(-bridge_rate * np.maximum(gap0, 0.0) * np.maximum(gap1, 0.0))
            crossed |= rng.random((alive.size, m)) < prob
        hit = crossed.any(axis=1)
        first = np.argmax(crossed, axis=1)[hit]
        k = step + first
        if bridge_correction:
            times[alive[hit]] = (k + rng.random(k.size)) * dt
        else:
            times[alive[hit]] = (k + 1) * dt
        pos[alive] = path[:, -1]
        alive = alive[~hit]
        step += m

    hits = times[~np.isnan(times)]
    return FptSample(hits, int(alive.size), dt, n_paths, seed, max_time, p, bool(bridge_correction))


def empirical_vs_theoretical(s):
    """K-S distance between simulated hitting times and the implied IG law."""
    if s.hits.size == 0:
        raise EmptySample("no path reached the barrier")
    if s.censored:
        raise CensoredSample(f"{s.censored} paths were censored; comparison would be biased")
    target = fpt_to_ig_params(s.params)
    return ks_test(s.hits, lambda t: igd.cdf(t, target))


def martingale_check(a, t, n=1_000_000, seed=0):
    """Monte Carlo mean of exp(a W(t) - a^2 t / 2) and its standard error."""
    n = int(n)
    if n < 100:
        raise InputError(f"n must be >= 100, got {n}")
    if not t > 0:
        raise InputError(f"t must be > 0, got {t}")
    w = math.sqrt(t) * make_rng(seed).standard_normal(n)
    vals = np.exp(a * w - 0.5 * a * a * t)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n))
