"""Validation harness for the IG-GLM: k-fold cross-validation, correlation
significance, and plot-ready diagnostic series.

Nothing here draws; every function returns plain arrays or dicts that a
plotting layer (or the CLI's CSV writer) can consume.
"""

from dataclasses import dataclass, field
import math
from typing import NamedTuple

import numpy as np
from scipy import special, stats

from ._random import make_rng
from .exceptions import ConstantColumn, DimensionMismatch, FoldTooSmall, InputError, ZeroVarianceTarget
from .glm import GlmSpec, cooks_distance, irls_fit, leverage, predict, residuals

QQ_REFERENCE_BAND = (-2.0, 2.0)
DENSITY_GRID_POINTS = 200


class Metrics(NamedTuple):
    mse: float
    mae: float
    r2: float

    def as_dict(self):
        return self._asdict()


def error_metrics(y, yhat):
    y = np.asarray(y, dtype=float).ravel()
    yhat = np.asarray(yhat, dtype=float).ravel()
    if y.size == 0 or y.shape != yhat.shape:
        raise DimensionMismatch(f"need equal nonzero lengths, got {y.size} and {yhat.size}")
    resid = y - yhat
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0:
        raise ZeroVarianceTarget("r2 undefined: target has zero variance")
    return Metrics(float(np.mean(resid**2)), float(np.mean(np.abs(resid))),
                   1.0 - float(np.sum(resid**2)) / ss_tot)


# -- cross-validation ----------------------------------------------------------


@dataclass(frozen=True)
class CvConfig:
    folds: int = 5
    seed: int = 0
    shuffle: bool = True


def fold_assignment(n, config):
    """Fold label per row: seeded shuffle, then round-robin dealing."""
    k = int(config.folds)
    if k < 2 or k > n:
        raise FoldTooSmall(f"folds must satisfy 2 <= k <= n, got k={k}, n={n}")
    order = make_rng(config.seed).permutation(n) if config.shuffle else np.arange(n)
    labels = np.empty(n, dtype=int)
    labels[order] = np.arange(n) % k
    return labels


def _fold_metrics(y, yhat):
    try:
        return error_metrics(y, yhat)
    except ZeroVarianceTarget:
        resid = y - yhat
        return Metrics(float(np.mean(resid**2)), float(np.mean(np.abs(resid))), math.nan)


@dataclass(frozen=True)
class CvReport:
    train: Metrics
    test: Metrics
    folds: list = field(default_factory=list)
    config: CvConfig = CvConfig()

    def as_dict(self):
        return {
            "folds_k": self.config.folds,
            "seed": self.config.seed,
            "shuffle": self.config.shuffle,
            "train": self.train.as_dict(),
            "test": self.test.as_dict(),
            "per_fold": self.folds,
        }


def k_fold_cv(X, y, spec=GlmSpec(), config=CvConfig()):
    """Cross-validated train/test MSE, MAE and R^2 on the response scale.

    Aggregates are unweighted means over folds. A test fold whose response
    is constant (e.g. a single row) reports R^2 as NaN and is skipped in the
    R^2 mean.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float).ravel()
    n = y.size
    p = X.shape[1] + int(spec.intercept)
    labels = fold_assignment(n, config)
    rows = []
    for f in range(int(config.folds)):
        test = labels == f
        train = ~test
        if train.sum() <= p:
            raise FoldTooSmall(f"fold {f}: {int(train.sum())} training rows for {p} coefficients")
        fit = irls_fit(X[train], y[train], spec)
        m_train = _fold_metrics(y[train], predict(fit, X[train]))
        m_test = _fold_metrics(y[test], predict(fit, X[test]))
        rows.append({
            "fold": f,
            "n_train": int(train.sum()),
            "n_test": int(test.sum()),
            "train": m_train.as_dict(),
            "test": m_test.as_dict(),
        })

    def mean(part):
        cols = np.array([[r[part][k] for k in Metrics._fields] for r in rows])
        return Metrics(*(float(np.nanmean(c)) if not np.all(np.isnan(c)) else math.nan for c in cols.T))

    return CvReport(mean("train"), mean("test"), rows, config)


# -- correlation ---------------------------------------------------------------


@dataclass(frozen=True)
class CorrelationRow:
    pair: str
    r: float
    t_statistic: float
    p_value: float
    ci_low: float
    ci_high: float
    n: int

    def as_dict(self):
        return {
            "pair": self.pair, "r": self.r, "t_statistic": self.t_statistic,
            "p_value": self.p_value, "ci_low": self.ci_low, "ci_high": self.ci_high, "n": self.n,
        }


def correlation_test(x, y, pair="", level=0.95):
    """Pearson r with Student-t test (n-2 df) and a Fisher-z interval.

    At |r| = 1 the t statistic is reported as +/-inf with p-value 0.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if n < 3 or y.size != n:
        raise InputError("correlation needs two columns of equal length >= 3")
    for v, nm in ((x, "predictor"), (y, "target")):
        if np.ptp(v) == 0:
            raise ConstantColumn(f"{pair or nm} column is constant")
    xc, yc = x - x.mean(), y - y.mean()
    r = float(np.sum(xc * yc) / math.sqrt(np.sum(xc**2) * np.sum(yc**2)))
    r = min(1.0, max(-1.0, r))
    if abs(r) >= 1.0 - 1e-15:
        r = math.copysign(1.0, r)
        return CorrelationRow(pair, r, math.copysign(math.inf, r), 0.0, r, r, n)
    df = n - 2
    t = r * math.sqrt(df) / math.sqrt(1.0 - r * r)
    p = float(2.0 * stats.t.sf(abs(t), df))
    if n > 3:
        half = special.ndtri(0.5 * (1.0 + level)) / math.sqrt(n - 3)
        z = math.atanh(r)
        lo, hi = math.tanh(z - half), math.tanh(z + half)
    else:
        lo, hi = -1.0, 1.0
    return CorrelationRow(pair, r, t, p, lo, hi, n)


def correlation_report(table, target="PE", predictors=None):
    """One row per predictor-target pair, in table column order by default."""
    if target not in table:
        raise InputError(f"unknown target column {target!r}")
    if predictors is None:
        predictors = [c for c in table.names if c != target]
    return [correlation_test(table[c], table[target], f"{c}-{target}") for c in predictors]


# -- plot data -----------------------------------------------------------------


def qq_points(resid):
    """(standard-normal quantile, order statistic) pairs at (i - 0.5)/n."""
    r = np.sort(np.asarray(resid, dtype=float).ravel())
    n = r.size
    if n < 2:
        raise InputError("qq_points needs at least two residuals")
    theo = special.ndtri((np.arange(1, n + 1) - 0.5) / n)
    return np.column_stack([theo, r])


def diagnostic_bundle(fit, X, y):
    """Series for the four diagnostic panels plus standardized residuals.

    Standardized Pearson residuals divide by sqrt(1 - h) with h the weighted
    leverage; ``reference_band`` gives the +/-2 guide lines.
    """
    y = np.asarray(y, dtype=float).ravel()
    mu = predict(fit, X)
    pearson = residuals(fit, X, y, "pearson")
    h = leverage(fit, X)
    standardized = pearson / np.sqrt(1.0 - h)
    cooks = cooks_distance(fit, X, y)
    qq = qq_points(residuals(fit, X, y, "anscombe"))
    idx = np.arange(y.size)
    return {
        "residuals_vs_fitted": {"fitted": mu, "pearson_residual": pearson},
        "scale_location": {"fitted": mu, "sqrt_abs_standardized_residual": np.sqrt(np.abs(standardized))},
        "cooks_distance": {"index": idx, "cooks_distance": cooks},
        "qq_anscombe": {"theoretical_quantile": qq[:, 0], "sample_quantile": qq[:, 1]},
        "standardized_residuals": {"fitted": mu, "standardized_residual": standardized},
        "reference_band": QQ_REFERENCE_BAND,
    }


def density_overlay(sample, comparison, bins=50):
    """Density histogram of ``sample`` and each fitted law on a 200-point grid."""
    x = np.asarray(sample, dtype=float).ravel()
    if x.size < 1 or int(bins) < 1:
        raise InputError("density_overlay needs a nonempty sample and bins >= 1")
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    density, edges = np.histogram(x, bins=int(bins), range=(lo, hi), density=True)
    grid = np.linspace(float(x.min()), float(x.max()), DENSITY_GRID_POINTS)
    curves = {row.name: row.model.pdf(grid) for row in comparison.rows}
    return {"edges": edges, "density": density, "grid": grid, "curves": curves}
