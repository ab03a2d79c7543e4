"""Loading and screening of the combined-cycle power plant (CCPP) table.

The public CSV export has the header ``AT,V,AP,RH,PE``; ``AT`` (ambient
temperature) is accepted as an alias for ``T``. Matching is otherwise exact
up to letter case. Missing cells are an error: no imputation is attempted.
"""

from dataclasses import dataclass, field
import csv
import math
from pathlib import Path

import numpy as np
from scipy import stats
from sklearn.base import BaseEstimator, OutlierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import HeaderMismatch, InputError, MissingValue, ParseError, SingularCovariance

# Published min/max of each CCPP column (9,568 hourly rows, 2006-2011).
CCPP_ENVELOPE = {
    "T": (1.81, 37.11),
    "V": (25.36, 81.56),
    "AP": (992.89, 1033.30),
    "RH": (25.56, 100.16),
    "PE": (420.26, 495.76),
}
CCPP_UNITS = {"T": "degC", "V": "cm Hg", "AP": "mbar", "RH": "%", "PE": "MW"}


@dataclass(frozen=True)
class CcppSchema:
    columns: tuple = ("T", "V", "AP", "RH", "PE")
    aliases: dict = field(default_factory=lambda: {"AT": "T"})

    def resolve(self, header):
        """Map canonical column name -> position in ``header``."""
        lookup = {}
        for pos, raw in enumerate(header):
            key = raw.strip().upper()
            key = {k.upper(): v for k, v in self.aliases.items()}.get(key, key)
            for name in self.columns:
                if key == name.upper() and name not in lookup:
                    lookup[name] = pos
        missing = [c for c in self.columns if c not in lookup]
        if missing:
            raise HeaderMismatch(missing, header)
        return lookup


CCPP_SCHEMA = CcppSchema()


class DataTable:
    """Immutable, column-oriented numeric table."""

    def __init__(self, columns):
        cols = {str(k): np.array(v, dtype=float) for k, v in dict(columns).items()}
        lengths = {v.shape for v in cols.values()}
        if len(lengths) > 1 or any(len(s) != 1 for s in lengths):
            raise InputError("all columns must be 1-D and of equal length")
        for v in cols.values():
            v.setflags(write=False)
        self._cols = cols

    @property
    def names(self):
        return list(self._cols)

    @property
    def n(self):
        return next(iter(self._cols.values())).size if self._cols else 0

    def __len__(self):
        return self.n

    def __contains__(self, name):
        return name in self._cols

    def __getitem__(self, name):
        try:
            return self._cols[name]
        except KeyError:
            raise KeyError(f"unknown column {name!r}; available: {', '.join(self._cols)}") from None

    def matrix(self, names):
        return np.column_stack([self[nm] for nm in names]) if names else np.empty((self.n, 0))

    def __eq__(self, other):
        return (
            isinstance(other, DataTable)
            and self.names == other.names
            and all(np.array_equal(self[k], other[k]) for k in self.names)
        )


def load_csv(path, schema=CCPP_SCHEMA):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise HeaderMismatch(schema.columns, []) from None
        lookup = schema.resolve(header)
        data = {name: [] for name in schema.columns}
        # Error coordinates use the 0-based data row index, as in DataTable.
        row_no = -1
        for row in reader:
            if not row:
                continue
            row_no += 1
            if len(row) > len(header):
                # A stray delimiter would otherwise shift values between columns.
                raise ParseError(row_no, None, ",".join(row))
            for name, pos in lookup.items():
                text = row[pos].strip() if pos < len(row) else ""
                if not text:
                    raise MissingValue(row_no, name)
                try:
                    value = float(text)
                except ValueError:
                    raise ParseError(row_no, name, text) from None
                if math.isnan(value):
                    raise MissingValue(row_no, name)
                data[name].append(value)
    return DataTable(data)


@dataclass(frozen=True)
class RangeViolation:
    column: str
    row: int
    value: float
    bound: float
    side: str

    def as_dict(self):
        return {"column": self.column, "row": self.row, "value": self.value,
                "bound": self.bound, "side": self.side}


def validate_ranges(table, envelope=CCPP_ENVELOPE):
    """Rows outside the published envelope. Advisory only: never raises."""
    out = []
    for name, (lo, hi) in envelope.items():
        if name not in table:
            continue
        col = table[name]
        for i in np.flatnonzero(col < lo):
            out.append(RangeViolation(name, int(i), float(col[i]), lo, "below"))
        for i in np.flatnonzero(col > hi):
            out.append(RangeViolation(name, int(i), float(col[i]), hi, "above"))
    return sorted(out, key=lambda v: (v.row, v.column))


def _estimate_cov(X):
    if X.shape[1] == 0 or X.shape[0] <= X.shape[1]:
        raise SingularCovariance("need more rows than columns to estimate a covariance")
    return X.mean(axis=0), np.atleast_2d(np.cov(X, rowvar=False))


def _mahalanobis(X, center, cov):
    sd = np.sqrt(np.diag(cov))
    if np.any(sd == 0):
        raise SingularCovariance("a selected column is constant")
    corr = cov / np.outer(sd, sd)
    if np.linalg.cond(corr) > 1e12:
        raise SingularCovariance("sample covariance is singular")
    diff = (X - center) / sd
    return np.einsum("ij,ij->i", diff, np.linalg.solve(corr, diff.T).T)


@dataclass(frozen=True)
class OutlierReport:
    indices: np.ndarray
    distances: np.ndarray
    threshold: float


def mahalanobis_outliers(table, columns, threshold_p=0.01):
    """Flag rows whose squared Mahalanobis distance exceeds chi2(d) at 1 - p."""
    if not 0 < threshold_p < 1:
        raise ValueError("threshold_p must lie in (0, 1)")
    X = table.matrix(list(columns)) if isinstance(table, DataTable) else np.asarray(table, float)
    d2 = _mahalanobis(X, *_estimate_cov(X))
    cut = float(stats.chi2.isf(threshold_p, X.shape[1]))
    return OutlierReport(np.flatnonzero(d2 > cut), d2, cut)


class MahalanobisOutlierDetector(OutlierMixin, BaseEstimator):
    """Chi-square screen on squared Mahalanobis distance.

    ``predict`` returns -1 for outliers and 1 for inliers.
    """

    def __init__(self, threshold_p=0.01):
        self.threshold_p = threshold_p

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        self.location_, self.covariance_ = _estimate_cov(X)
        _mahalanobis(X, self.location_, self.covariance_)
        self.threshold_ = float(stats.chi2.isf(self.threshold_p, X.shape[1]))
        self.n_features_in_ = X.shape[1]
        return self

    def mahalanobis(self, X):
        check_is_fitted(self, "covariance_")
        return _mahalanobis(check_array(X, dtype=float), self.location_, self.covariance_)

    def decision_function(self, X):
        return self.threshold_ - self.mahalanobis(X)

    def predict(self, X):
        return np.where(self.decision_function(X) < 0, -1, 1)
