"""Inverse Gaussian law IG(mu, lambda): density, distribution function,
quantiles, random variates and the exponential-family coordinates.

The density on x > 0 is

    f(x; mu, lam) = sqrt(lam / (2 pi x^3)) * exp(-lam (x - mu)^2 / (2 mu^2 x))

with mean ``mu`` and variance ``mu**3 / lam``. All functions accept scalars
or array-likes for ``x``/``q`` and return a float for scalar input.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import special

from ._random import make_rng
from .exceptions import DomainError

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class IgParams:
    """Mean ``mu`` and shape ``lam`` of an inverse Gaussian law."""

    mu: float
    lam: float

    def __post_init__(self):
        for name in ("mu", "lam"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise DomainError(f"{name} must be a real number, got {value!r}") from None
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value}")
            object.__setattr__(self, name, value)

    @property
    def mean(self):
        return self.mu

    @property
    def variance(self):
        return self.mu**3 / self.lam

    def as_dict(self):
        return {"mu": self.mu, "lambda": self.lam}


@dataclass(frozen=True)
class CanonicalForm:
    """Natural parameters paired with the sufficient statistics (x, 1/x).

    ``eta1 = -lam / (2 mu^2)`` and ``eta2 = -lam / 2``; both are negative on
    the whole parameter space.
    """

    eta1: float
    eta2: float

    def __post_init__(self):
        for name in ("eta1", "eta2"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value < 0):
                raise DomainError(f"{name} must be finite and < 0, got {value}")
            object.__setattr__(self, name, value)

    def log_partition(self):
        return log_partition(self.eta1, self.eta2)

    def mean_sufficient_statistics(self):
        """Gradient of the log-partition: (E[X], E[1/X])."""
        root = math.sqrt(self.eta1 * self.eta2)
        return -self.eta2 / root, -self.eta1 / root - 0.5 / self.eta2


def log_partition(eta1, eta2):
    """A(eta) = -2 sqrt(eta1 eta2) - log(-2 eta2) / 2, with carrier 1/sqrt(2 pi x^3)."""
    return -2.0 * np.sqrt(eta1 * eta2) - 0.5 * np.log(-2.0 * eta2)


def to_canonical(p):
    return CanonicalForm(-p.lam / (2.0 * p.mu**2), -p.lam / 2.0)


def from_canonical(c):
    return IgParams(mu=math.sqrt(c.eta2 / c.eta1), lam=-2.0 * c.eta2)


def moments(p):
    """Return ``(mean, variance)``."""
    return p.mu, p.mu**3 / p.lam


def _positive(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)) or np.any(~np.isfinite(arr) & ~np.isposinf(arr)):
        raise DomainError(f"{name} must be strictly positive")
    return arr


def _out(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def log_pdf(x, p):
    arr = _positive(x)
    with np.errstate(over="ignore", invalid="ignore"):
        val = 0.5 * (math.log(p.lam) - _LOG_2PI - 3.0 * np.log(arr)) - p.lam * (
            arr - p.mu
        ) ** 2 / (2.0 * p.mu**2 * arr)
    val = np.where(np.isposinf(arr), -np.inf, val)
    return _out(val, x)


def pdf(x, p):
    return _out(np.exp(log_pdf(np.asarray(x, dtype=float), p)), x)


def _tails(arr, p):
    """Lower and upper tail probabilities, each summed from its small terms."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        root = np.sqrt(p.lam / arr)
        a = root * (arr / p.mu - 1.0)
        # exp(2 lam / mu) overflows for large lam/mu; fold it into log Phi.
        reflected = np.exp(2.0 * p.lam / p.mu + special.log_ndtr(-root * (arr / p.mu + 1.0)))
        lower = special.ndtr(a) + reflected
        upper = special.ndtr(-a) - reflected
    return lower, upper


def cdf(x, p):
    """Distribution function via the two-term Gaussian closed form.

    Above the mean it is evaluated as one minus the survival function so the
    result stays nondecreasing as it approaches 1.
    """
    arr = _positive(x)
    lower, upper = _tails(arr, p)
    val = np.where(arr > p.mu, 1.0 - upper, lower)
    val = np.where(np.isposinf(arr), 1.0, val)
    return _out(np.clip(val, 0.0, 1.0), x)


def sf(x, p):
    """Survival function 1 - F(x), accurate in the upper tail."""
    arr = _positive(x)
    lower, upper = _tails(arr, p)
    val = np.where(arr > p.mu, upper, 1.0 - lower)
    val = np.where(np.isposinf(arr), 0.0, val)
    return _out(np.clip(val, 0.0, 1.0), x)


def _quantile_scalar(q, phi):
    """Quantile of IG(1, phi); callers rescale by mu."""
    # Moment-matched lognormal start point.
    s2 = math.log1p(1.0 / phi)
    y = math.exp(-0.5 * s2 + math.sqrt(s2) * special.ndtri(q))
    unit = IgParams(1.0, phi)

    lo = hi = y
    while cdf(lo, unit) > q:
        lo *= 0.5
    while cdf(hi, unit) < q:
        hi *= 2.0

    for _ in range(200):
        err = cdf(y, unit) - q
        if err > 0:
            hi = min(hi, y)
        elif err < 0:
            lo = max(lo, y)
        else:
            return y
        dens = pdf(y, unit)
        step = err / dens if dens > 0 else math.inf
        y_new = y - step
        if not (lo < y_new < hi):
            y_new = 0.5 * (lo + hi)
        if abs(y_new - y) <= 4e-16 * y and abs(err) <= 1e-10:
            return y_new
        if hi - lo <= 4e-16 * hi:
            return y_new
        y = y_new
    return y


def quantile(q, p):
    arr = np.asarray(q, dtype=float)
    if np.any(~((arr > 0) & (arr < 1))):
        raise DomainError("q must lie strictly inside (0, 1)")
    phi = p.lam / p.mu
    flat = np.array([_quantile_scalar(float(v), phi) for v in arr.ravel()])
    return _out(p.mu * flat.reshape(arr.shape), q)


def rvs(mu, lam, size=None, random_state=None):
    """Draw variates by transformation with rejection.

    For nu = Z^2 the smaller root x1 of the quadratic is kept with
    probability mu / (mu + x1), otherwise the larger root mu^2 / x1 is
    returned. ``mu`` and ``lam`` broadcast against ``size``.
    """
    rng = make_rng(0 if random_state is None else random_state)
    mu = np.asarray(mu, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if size is None:
        size = np.broadcast(mu, lam).shape
    nu = rng.standard_normal(size) ** 2
    u = rng.random(size)
    half = mu / (2.0 * lam)
    # Larger root computed directly; the smaller follows from x1 * x2 = mu^2
    # without the cancellation of the textbook formula.
    x2 = mu + half * mu * nu + half * np.sqrt(4.0 * mu * lam * nu + (mu * nu) ** 2)
    x1 = mu**2 / x2
    return np.where(u <= mu / (mu + x1), x1, x2)


def sample(p, n, seed):
    """``n`` reproducible draws from IG(p) under the 64-bit ``seed``."""
    n = int(n)
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    return rvs(p.mu, p.lam, size=n, random_state=make_rng(seed))
