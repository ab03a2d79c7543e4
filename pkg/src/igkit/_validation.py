"""Input checks shared by the estimators and functional entry points."""

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import DimensionMismatch, EmptySample, NonPositiveResponse, NonPositiveValue


def check_sample(sample, min_size=1):
    """Flatten ``sample`` to a finite 1-D float array of positive values."""
    arr = np.asarray(sample, dtype=float)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.ravel()
    if arr.ndim != 1:
        raise DimensionMismatch(f"expected a 1-D sample, got shape {arr.shape}")
    if arr.size < max(min_size, 1):
        raise EmptySample(f"need at least {max(min_size, 1)} observations, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise NonPositiveValue("sample contains non-finite values")
    if np.any(arr <= 0):
        raise NonPositiveValue("sample values must be strictly positive")
    return arr


def check_design(X, y=None):
    """Validate a design matrix and (optionally) a positive response."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim == 2 and X.shape[1] == 0:
        # Intercept-only models carry no predictor columns.
        X = X.reshape(X.shape[0] if y is None else np.asarray(y).size, 0)
    else:
        X = check_array(X, dtype=float, ensure_2d=True)
    if y is None:
        return X
    return X, check_response(y, X.shape[0])


def check_response(y, n_rows=None):
    y = np.asarray(y, dtype=float).ravel()
    if n_rows is not None and y.shape[0] != n_rows:
        raise DimensionMismatch(f"X has {n_rows} rows but y has {y.shape[0]}")
    if not np.all(np.isfinite(y)) or np.any(y <= 0):
        raise NonPositiveResponse("response must be finite and strictly positive")
    return y
