"""Likelihood inference for i.i.d. inverse Gaussian samples.

Closed-form maximum likelihood, small-sample shape correction, Fisher
information and the Wald / likelihood-ratio machinery built on it, plus
Kolmogorov-Smirnov goodness of fit against IG, normal and exponential
competitors.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import optimize, special, stats
from sklearn.base import BaseEstimator, DensityMixin
from sklearn.utils.validation import check_is_fitted

from . import distribution as igd
from ._random import child_rng, make_rng
from ._validation import check_sample
from .distribution import IgParams
from .exceptions import DegenerateSample, EmptySample, InvalidCorrection, SingularCovariance

KS_METHODS = ("asymptotic-naive", "parametric-bootstrap")
LOCATION_CONVENTIONS = ("zero", "shifted")
DISTRIBUTIONS = ("ig", "normal", "exponential")


def _inverse_spread(x):
    """sum(1/x_i - 1/xbar) with the scale-aware degeneracy check."""
    n = x.size
    xbar = x.mean()
    s = float(np.sum(1.0 / x - 1.0 / xbar))
    if not s >= 1e-12 * n / xbar:
        raise DegenerateSample("sample is numerically constant; shape estimate diverges")
    return xbar, s


def chi2_sf(stat, df):
    """Upper tail of chi-square via the regularized incomplete gamma."""
    if math.isinf(stat):
        return 0.0
    return float(special.gammaincc(0.5 * df, 0.5 * max(stat, 0.0)))


@dataclass(frozen=True)
class MleFit:
    params: IgParams
    n: int
    loglik: float
    cov: np.ndarray = field(repr=False)

    @property
    def se_mu(self):
        return math.sqrt(self.cov[0, 0])

    @property
    def se_lam(self):
        return math.sqrt(self.cov[1, 1])

    def as_dict(self):
        return {
            "mu": self.params.mu,
            "lambda": self.params.lam,
            "n": self.n,
            "loglik": self.loglik,
            "se_mu": self.se_mu,
            "se_lambda": self.se_lam,
            "cov": self.cov.tolist(),
        }


def loglik(sample, p):
    return float(np.sum(igd.log_pdf(np.asarray(sample, dtype=float), p)))


def fisher_information(p):
    """Per-observation expected information for (mu, lam).

    The cross term E[d2 l / dmu dlam] = E[(mu - X)] / mu^3 vanishes, so the
    matrix is diagonal: mu-hat and lam-hat are asymptotically independent.
    """
    return np.array([[p.lam / p.mu**3, 0.0], [0.0, 0.5 / p.lam**2]])


def score(x, p):
    """Per-observation score vectors, shape (n, 2)."""
    x = np.asarray(x, dtype=float)
    d_mu = p.lam * (x - p.mu) / p.mu**3
    d_lam = 0.5 / p.lam - (x - p.mu) ** 2 / (2.0 * p.mu**2 * x)
    return np.column_stack([d_mu, d_lam])


def fit_mle(sample):
    x = check_sample(sample, min_size=2)
    xbar, s = _inverse_spread(x)
    params = IgParams(xbar, x.size / s)
    cov = np.linalg.inv(fisher_information(params)) / x.size
    return MleFit(params=params, n=x.size, loglik=loglik(x, params), cov=cov)


def bias_corrected_lambda(sample, c=3):
    """Shape estimate ``(n - c) / sum(1/x_i - 1/xbar)``.

    ``lam * sum(1/X_i - 1/Xbar)`` is chi-square with n-1 degrees of freedom,
    so ``c = 3`` gives an exactly unbiased estimator and ``c = 0`` is the MLE.
    """
    x = check_sample(sample, min_size=2)
    c = int(c)
    if c < 0 or c >= x.size:
        raise InvalidCorrection(f"correction c must satisfy 0 <= c < n, got c={c}, n={x.size}")
    _, s = _inverse_spread(x)
    return (x.size - c) / s


@dataclass(frozen=True)
class Interval:
    lower: float
    upper: float
    truncated: bool = False

    def as_dict(self):
        return {"lower": self.lower, "upper": self.upper, "truncated": self.truncated}


def confidence_intervals(fit, level=0.95):
    """Wald intervals for (mu, lam); lower ends are clipped at zero."""
    if not 0 < level < 1:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    z = special.ndtri(0.5 * (1.0 + level))
    out = []
    for est, se in ((fit.params.mu, fit.se_mu), (fit.params.lam, fit.se_lam)):
        lo, hi = est - z * se, est + z * se
        out.append(Interval(max(lo, 0.0), hi, truncated=lo < 0))
    return tuple(out)


def wald_test(fit, null):
    """Quadratic form of the displacement in the inverse covariance, chi2(2)."""
    d = np.array([fit.params.mu - null.mu, fit.params.lam - null.lam])
    cov = np.asarray(fit.cov, dtype=float)
    if not np.all(np.isfinite(cov)) or np.linalg.det(cov) <= 0 or np.linalg.cond(cov) > 1e14:
        raise SingularCovariance("covariance matrix is singular or not positive definite")
    stat = float(d @ np.linalg.solve(cov, d))
    return stat, chi2_sf(stat, 2)


def likelihood_ratio_test(sample, null):
    x = check_sample(sample, min_size=2)
    fit = fit_mle(x)
    stat = max(2.0 * (fit.loglik - loglik(x, null)), 0.0)
    return stat, chi2_sf(stat, 2)


# -- goodness of fit ----------------------------------------------------------


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float
    method: str = "asymptotic-naive"

    def as_dict(self):
        return {"statistic": self.statistic, "p_value": self.p_value, "method": self.method}


def ks_statistic(sample, cdf):
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    n = x.size
    F = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


@dataclass(frozen=True)
class FittedDistribution:
    """A competitor law fitted to a sample; ``loc`` is 0 unless shifted."""

    name: str
    params: dict
    loc: float = 0.0
    shifted: bool = False

    @property
    def n_params(self):
        return {"ig": 2, "normal": 2, "exponential": 1}[self.name] + int(self.shifted)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.name == "normal":
            return stats.norm.cdf(x, self.params["mean"], self.params["sd"])
        z = x - self.loc
        if self.name == "exponential":
            return stats.expon.cdf(z, scale=1.0 / self.params["rate"])
        p = IgParams(self.params["mu"], self.params["lambda"])
        out = np.zeros_like(z)
        pos = z > 0
        out[pos] = igd.cdf(z[pos], p)
        return out

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.name == "normal":
            return stats.norm.logpdf(x, self.params["mean"], self.params["sd"])
        z = x - self.loc
        if self.name == "exponential":
            return stats.expon.logpdf(z, scale=1.0 / self.params["rate"])
        p = IgParams(self.params["mu"], self.params["lambda"])
        out = np.full_like(z, -np.inf)
        pos = z > 0
        out[pos] = igd.log_pdf(z[pos], p)
        return out

    def pdf(self, x):
        return np.exp(self.logpdf(x))

    def rvs(self, n, rng):
        if self.name == "normal":
            return rng.normal(self.params["mean"], self.params["sd"], size=n)
        if self.name == "exponential":
            return self.loc + rng.exponential(1.0 / self.params["rate"], size=n)
        return self.loc + igd.rvs(self.params["mu"], self.params["lambda"], size=n, random_state=rng)

    def as_dict(self):
        return {"name": self.name, "params": dict(self.params, loc=self.loc)}


def _profile_ig_location(x):
    """Maximize the IG likelihood over a location below min(x).

    The location is searched on a log scale of distances below the sample
    minimum; for each candidate the remaining parameters are closed form.
    """
    lo, sd = x.min(), x.std()
    scale = sd if sd > 0 else abs(lo)

    def negll(t):
        y = x - (lo - scale * math.exp(t))
        try:
            ybar, s = _inverse_spread(y)
        except DegenerateSample:
            return math.inf
        return -loglik(y, IgParams(ybar, y.size / s))

    grid = np.linspace(-12.0, 12.0, 49)
    vals = [negll(t) for t in grid]
    k = int(np.argmin(vals))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    res = optimize.minimize_scalar(negll, bounds=(a, b), method="bounded", options={"xatol": 1e-10})
    t = res.x if res.fun <= vals[k] else grid[k]
    return lo - scale * math.exp(t)


def fit_distribution(name, sample, location="zero"):
    """Maximum likelihood fit of one competitor law.

    ``location="shifted"`` adds a location parameter to the IG and
    exponential fits (normal is unaffected).
    """
    if location not in LOCATION_CONVENTIONS:
        raise ValueError(f"location must be one of {LOCATION_CONVENTIONS}, got {location!r}")
    x = check_sample(sample, min_size=2)
    shifted = location == "shifted"
    if name == "normal":
        return FittedDistribution("normal", {"mean": float(x.mean()), "sd": float(x.std())})
    if name == "exponential":
        loc = float(x.min()) if shifted else 0.0
        return FittedDistribution("exponential", {"rate": 1.0 / float(x.mean() - loc)}, loc, shifted)
    if name == "ig":
        loc = _profile_ig_location(x) if shifted else 0.0
        fit = fit_mle(x - loc)
        return FittedDistribution("ig", fit.params.as_dict(), loc, shifted)
    raise ValueError(f"unknown distribution {name!r}; expected one of {DISTRIBUTIONS}")


def ks_test(sample, cdf, method="asymptotic-naive", model=None, n_boot=999, seed=0):
    """One-sample Kolmogorov-Smirnov test against ``cdf``.

    The naive p-value comes from the asymptotic Kolmogorov series and ignores
    that parameters were estimated. ``method="parametric-bootstrap"`` needs the
    fitted ``model``: each replicate is drawn from it, refitted with the same
    convention, and its statistic compared with the observed one.
    """
    x = np.asarray(sample, dtype=float).ravel()
    if x.size == 0:
        raise EmptySample("ks_test needs at least one observation")
    if method not in KS_METHODS:
        raise ValueError(f"method must be one of {KS_METHODS}, got {method!r}")
    d = ks_statistic(x, cdf)
    if method == "asymptotic-naive":
        return KsResult(d, float(special.kolmogorov(math.sqrt(x.size) * d)), method)

    if model is None:
        raise ValueError("parametric bootstrap requires the fitted model")
    location = "shifted" if model.shifted else "zero"
    exceed = 0
    for b in range(int(n_boot)):
        rng = child_rng(seed, b)
        xb = model.rvs(x.size, rng)
        try:
            mb = fit_distribution(model.name, xb, location)
        except (DegenerateSample, ValueError):
            continue
        if ks_statistic(xb, mb.cdf) >= d:
            exceed += 1
    return KsResult(d, (1 + exceed) / (int(n_boot) + 1), method)


@dataclass(frozen=True)
class ComparisonRow:
    name: str
    model: FittedDistribution
    ks: KsResult
    loglik: float
    aic: float

    def as_dict(self):
        out = self.model.as_dict()
        out.update(ks=self.ks.as_dict(), loglik=self.loglik, aic=self.aic)
        return out


@dataclass(frozen=True)
class DistributionComparison:
    rows: tuple
    location: str = "zero"

    def row(self, name):
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def as_dict(self):
        return {"location": self.location, "rows": [r.as_dict() for r in self.rows]}


def compare_distributions(
    sample, location="zero", ks_method="asymptotic-naive", n_boot=999, seed=0,
    distributions=DISTRIBUTIONS,
):
    x = check_sample(sample, min_size=8)
    rows = []
    for name in distributions:
        model = fit_distribution(name, x, location)
        ks = ks_test(x, model.cdf, method=ks_method, model=model, n_boot=n_boot, seed=seed)
        ll = float(np.sum(model.logpdf(x)))
        rows.append(ComparisonRow(name, model, ks, ll, 2.0 * model.n_params - 2.0 * ll))
    return DistributionComparison(tuple(rows), location)


class InverseGaussianEstimator(DensityMixin, BaseEstimator):
    """Fit IG(mu, lam) to a one-column sample.

    Parameters
    ----------
    bias_correction : int, default=0
        Subtracted from n in the shape estimate; 0 is the MLE, 3 is unbiased.

    Attributes
    ----------
    mu_, lambda_ : float
    result_ : MleFit
    """

    def __init__(self, bias_correction=0):
        self.bias_correction = bias_correction

    def fit(self, X, y=None):
        x = check_sample(X, min_size=2)
        self.result_ = fit_mle(x)
        self.mu_ = self.result_.params.mu
        self.lambda_ = (
            bias_corrected_lambda(x, self.bias_correction)
            if self.bias_correction
            else self.result_.params.lam
        )
        self.n_features_in_ = 1
        return self

    @property
    def params_(self):
        return IgParams(self.mu_, self.lambda_)

    def score_samples(self, X):
        check_is_fitted(self, "result_")
        return igd.log_pdf(check_sample(X), self.params_)

    def score(self, X, y=None):
        return float(np.sum(self.score_samples(X)))

    def sample(self, n_samples=1, random_state=0):
        check_is_fitted(self, "result_")
        return igd.rvs(self.mu_, self.lambda_, size=n_samples, random_state=make_rng(random_state))
