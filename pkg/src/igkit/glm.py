"""Generalized linear model with inverse Gaussian response.

Responses are modelled as y_i ~ IG(mu_i, 1/phi) with g(mu_i) = x_i' beta and
variance function V(mu) = mu^3. Fitting is iteratively reweighted least
squares with step-halving, started from mu = y.
"""

from dataclasses import dataclass, field
import math
import warnings

import numpy as np
from scipy import linalg
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import check_design
from .exceptions import (
    DimensionMismatch,
    DomainError,
    InvalidMeanDuringIteration,
    LeverageOne,
    NonConvergence,
    RankDeficientDesign,
    SingularCovariance,
)

LINKS = ("identity", "log", "inverse-squared")
RESIDUAL_KINDS = ("pearson", "anscombe", "deviance")
MAX_HALVINGS = 30


class NonPositivePredictionWarning(UserWarning):
    """Identity-link prediction fell outside the response support."""


# -- links ---------------------------------------------------------------------


class _Identity:
    name = "identity"

    def __call__(self, mu):
        return mu

    def inverse(self, eta):
        return eta

    def inverse_deriv(self, eta):
        return np.ones_like(eta)

    def valid(self, eta):
        return eta > 0


class _Log:
    name = "log"

    def __call__(self, mu):
        return np.log(mu)

    def inverse(self, eta):
        with np.errstate(over="ignore"):
            return np.exp(eta)

    def inverse_deriv(self, eta):
        return self.inverse(eta)

    def valid(self, eta):
        return np.isfinite(self.inverse(eta))


class _InverseSquared:
    """Canonical link, taken as eta = 1/mu^2 (decreasing, positive)."""

    name = "inverse-squared"

    def __call__(self, mu):
        return 1.0 / mu**2

    def inverse(self, eta):
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 / np.sqrt(eta)

    def inverse_deriv(self, eta):
        with np.errstate(divide="ignore", invalid="ignore"):
            return -0.5 * eta**-1.5

    def valid(self, eta):
        return eta > 0


_LINKS = {cls.name: cls() for cls in (_Identity, _Log, _InverseSquared)}


def get_link(name):
    try:
        return _LINKS[name]
    except KeyError:
        raise ValueError(f"unknown link {name!r}; expected one of {LINKS}") from None


# -- model pieces --------------------------------------------------------------


@dataclass(frozen=True)
class GlmSpec:
    link: str = "identity"
    max_iterations: int = 100
    tolerance: float = 1e-8
    intercept: bool = True

    def __post_init__(self):
        get_link(self.link)
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if int(self.max_iterations) < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class GlmFit:
    beta: np.ndarray
    dispersion: float
    deviance: float
    loglik: float
    vcov: np.ndarray = field(repr=False)
    iterations: int
    converged: bool
    link: str
    intercept: bool
    n: int
    fitted: np.ndarray = field(repr=False)
    trace: tuple = field(default=(), repr=False)

    @property
    def n_coef(self):
        return self.beta.size

    @property
    def se(self):
        return np.sqrt(np.diag(self.vcov))

    @property
    def dispersion_mle(self):
        """deviance / n, the maximum likelihood value of phi = 1/lambda."""
        return self.deviance / self.n

    def as_dict(self, names=None):
        names = list(names) if names is not None else [f"x{j}" for j in range(self.n_coef)]
        if self.intercept and len(names) == self.n_coef - 1:
            names = ["intercept"] + names
        aic, bic = information_criteria(self)
        return {
            "link": self.link,
            "coefficients": [
                {"name": nm, "estimate": float(b), "se": float(s)}
                for nm, b, s in zip(names, self.beta, self.se)
            ],
            "dispersion": self.dispersion,
            "deviance": self.deviance,
            "loglik": self.loglik,
            "aic": aic,
            "bic": bic,
            "n": self.n,
            "iterations": self.iterations,
            "converged": self.converged,
            "trace": list(self.trace),
        }


def design_matrix(X, intercept=True):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if intercept:
        X = np.column_stack([np.ones(X.shape[0]), X])
    return X


def check_rank(Xd):
    """Pivoted QR rank check with tolerance 1e-10 * largest column norm."""
    if Xd.shape[1] == 0:
        raise RankDeficientDesign("design matrix has no columns")
    _, R, _ = linalg.qr(Xd, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    tol = 1e-10 * np.max(np.linalg.norm(Xd, axis=0))
    rank = int(np.sum(diag > tol))
    if rank < Xd.shape[1]:
        raise RankDeficientDesign(f"design has rank {rank} < {Xd.shape[1]} columns")


def unit_deviance(y, mu):
    """d(y, mu) = (y - mu)^2 / (mu^2 y)."""
    y_arr = np.asarray(y, dtype=float)
    mu_arr = np.asarray(mu, dtype=float)
    if np.any(~(y_arr > 0)) or np.any(~(mu_arr > 0)):
        raise DomainError("unit deviance needs y > 0 and mu > 0")
    d = (y_arr - mu_arr) ** 2 / (mu_arr**2 * y_arr)
    return float(d) if d.ndim == 0 else d


def _response_gap(y, mu):
    """y - mu with differences below the rounding resolution of y set to 0."""
    gap = y - mu
    gap[np.abs(gap) <= 4.0 * np.finfo(float).eps * np.abs(y)] = 0.0
    return gap


def _ig_loglik(y, mu, phi):
    return float(np.sum(-0.5 * np.log(2.0 * math.pi * phi * y**3) - unit_deviance(y, mu) / (2.0 * phi)))


def _wls(Xd, z, w):
    sw = np.sqrt(w)
    beta, *_ = np.linalg.lstsq(Xd * sw[:, None], z * sw, rcond=None)
    return beta


def irls_fit(X, y, spec=GlmSpec(), strict=True):
    """Fit the IG-GLM by IRLS.

    ``X`` holds the predictors only; an intercept column is prepended when
    ``spec.intercept`` is set. With ``strict=False`` a fit that exhausts
    ``max_iterations`` is returned with ``converged=False`` instead of raising.
    """
    X, y = check_design(X, y)
    Xd = design_matrix(X, spec.intercept)
    n, p = Xd.shape
    if n <= p:
        raise DimensionMismatch(f"need more rows ({n}) than coefficients ({p})")
    check_rank(Xd)
    link = get_link(spec.link)

    def evaluate(beta):
        eta = Xd @ beta
        if not np.all(link.valid(eta)):
            return eta, None, math.inf
        mu = link.inverse(eta)
        if not np.all(np.isfinite(mu) & (mu > 0)):
            return eta, None, math.inf
        return eta, mu, float(np.sum(unit_deviance(y, mu)))

    mu = y.copy()
    eta = link(mu)
    beta = None
    dev = math.inf
    trace = []
    converged = False
    it = 0
    for it in range(1, int(spec.max_iterations) + 1):
        dmu = link.inverse_deriv(eta)
        w = dmu**2 / mu**3
        z = eta + (y - mu) / dmu
        proposal = _wls(Xd, z, w)

        anchor = beta
        if anchor is None and spec.intercept:
            anchor = np.zeros(p)
            anchor[0] = link(np.array(y.mean()))
        halvings = 0
        eta_new, mu_new, dev_new = evaluate(proposal)
        while mu_new is None or (beta is not None and dev_new > dev + 1e-12 * abs(dev)):
            if anchor is None or halvings >= MAX_HALVINGS:
                break
            proposal = anchor + 0.5 * (proposal - anchor)
            halvings += 1
            eta_new, mu_new, dev_new = evaluate(proposal)
        if mu_new is None:
            raise InvalidMeanDuringIteration(
                f"fitted means left the support at iteration {it} after {halvings} step halvings"
            )
        if beta is not None and dev_new > dev + 1e-12 * abs(dev):
            # No halving improves the deviance: already at the optimum numerically.
            trace.append({"iteration": it, "deviance": dev, "halvings": halvings})
            converged = True
            break

        trace.append({"iteration": it, "deviance": dev_new, "halvings": halvings})
        if beta is not None:
            change = abs(dev - dev_new)
            rel = change / dev_new if dev_new > 0 else (0.0 if change == 0 else math.inf)
            if rel < spec.tolerance or np.max(np.abs(proposal - beta)) < 1e-10:
                beta, eta, mu, dev = proposal, eta_new, mu_new, dev_new
                converged = True
                break
        beta, eta, mu, dev = proposal, eta_new, mu_new, dev_new

    if not converged and strict:
        raise NonConvergence(f"IRLS did not converge in {spec.max_iterations} iterations", trace)

    w = link.inverse_deriv(eta) ** 2 / mu**3
    pearson_chi2 = float(np.sum(_response_gap(y, mu) ** 2 / mu**3))
    phi = pearson_chi2 / (n - p)
    # (X'WX)^-1 = R^-1 R^-T from the QR factor of W^1/2 X, which avoids
    # squaring the condition number.
    _, R = np.linalg.qr(Xd * np.sqrt(w)[:, None])
    if not np.all(np.isfinite(R)) or np.min(np.abs(np.diag(R))) == 0:
        raise SingularCovariance("weighted design lost rank at the fitted means")
    r_inv = linalg.solve_triangular(R, np.eye(p))
    vcov = phi * (r_inv @ r_inv.T)
    phi_mle = dev / n
    ll = _ig_loglik(y, mu, phi_mle) if phi_mle > 0 else math.inf
    return GlmFit(
        beta=beta, dispersion=phi, deviance=dev, loglik=ll, vcov=vcov, iterations=it,
        converged=converged, link=link.name, intercept=spec.intercept, n=n, fitted=mu,
        trace=tuple(trace),
    )


def _fit_design(fit, X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None] if fit.n_coef - int(fit.intercept) == 1 else X[None, :]
    Xd = design_matrix(X, fit.intercept)
    if Xd.shape[1] != fit.n_coef:
        raise DimensionMismatch(
            f"X has {Xd.shape[1] - int(fit.intercept)} predictor columns, "
            f"fit expects {fit.n_coef - int(fit.intercept)}"
        )
    return Xd


def predict(fit, X):
    """Inverse link of X beta.

    Identity-link predictions at or below zero are returned unchanged and
    reported with ``NonPositivePredictionWarning``.
    """
    Xd = _fit_design(fit, X)
    mu = get_link(fit.link).inverse(Xd @ fit.beta)
    bad = int(np.sum(~(mu > 0)))
    if bad:
        warnings.warn(f"{bad} predictions are not positive", NonPositivePredictionWarning, stacklevel=2)
    return mu


def residuals(fit, X, y, kind="pearson"):
    if kind not in RESIDUAL_KINDS:
        raise ValueError(f"kind must be one of {RESIDUAL_KINDS}, got {kind!r}")
    y = np.asarray(y, dtype=float).ravel()
    mu = predict(fit, X)
    if mu.shape != y.shape:
        raise DimensionMismatch(f"{mu.size} fitted values vs {y.size} responses")
    # phi == 0 only when every y equals its fit, where all residuals are 0.
    phi = fit.dispersion if fit.dispersion > 0 else 1.0
    s = math.sqrt(phi)
    gap = _response_gap(y, mu)
    exact = gap == 0
    if kind == "pearson":
        return gap / (s * mu**1.5)
    if kind == "anscombe":
        return np.where(exact, 0.0, np.log(y) - np.log(mu)) / (s * np.sqrt(mu))
    return np.sign(gap) * np.sqrt(np.where(exact, 0.0, unit_deviance(y, mu)) / phi)


def leverage(fit, X):
    """Diagonal of the weighted hat matrix W^1/2 X (X'WX)^-1 X' W^1/2."""
    Xd = _fit_design(fit, X)
    link = get_link(fit.link)
    eta = Xd @ fit.beta
    mu = link.inverse(eta)
    w = link.inverse_deriv(eta) ** 2 / mu**3
    Q, _ = np.linalg.qr(Xd * np.sqrt(w)[:, None])
    return np.sum(Q**2, axis=1)


def cooks_distance(fit, X, y):
    h = leverage(fit, X)
    if np.any(h >= 1.0 - 1e-12):
        raise LeverageOne(f"observation {int(np.argmax(h))} has leverage 1")
    r = residuals(fit, X, y, "pearson")
    return r**2 * h / (fit.n_coef * (1.0 - h) ** 2)


def information_criteria(fit):
    """(AIC, BIC) counting the dispersion as a parameter."""
    k = fit.n_coef + 1
    return 2.0 * k - 2.0 * fit.loglik, k * math.log(fit.n) - 2.0 * fit.loglik


class InverseGaussianRegressor(RegressorMixin, BaseEstimator):
    """scikit-learn wrapper around :func:`irls_fit`.

    Parameters
    ----------
    link : {"identity", "log", "inverse-squared"}, default="identity"
    fit_intercept : bool, default=True
    max_iter : int, default=100
    tol : float, default=1e-8
        Relative change in deviance that stops the iteration.
    """

    def __init__(self, link="identity", fit_intercept=True, max_iter=100, tol=1e-8):
        self.link = link
        self.fit_intercept = fit_intercept
        self.max_iter = max_iter
        self.tol = tol

    def _spec(self):
        return GlmSpec(self.link, self.max_iter, self.tol, self.fit_intercept)

    def fit(self, X, y):
        X, y = check_design(X, y)
        self.result_ = irls_fit(X, y, self._spec())
        beta = self.result_.beta
        self.intercept_ = float(beta[0]) if self.fit_intercept else 0.0
        self.coef_ = beta[1:] if self.fit_intercept else beta
        self.dispersion_ = self.result_.dispersion
        self.n_iter_ = self.result_.iterations
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "result_")
        return predict(self.result_, check_array(X, dtype=float))

    def residuals(self, X, y, kind="pearson"):
        check_is_fitted(self, "result_")
        return residuals(self.result_, check_array(X, dtype=float), y, kind)

    def cooks_distance(self, X, y):
        check_is_fitted(self, "result_")
        return cooks_distance(self.result_, check_array(X, dtype=float), y)
