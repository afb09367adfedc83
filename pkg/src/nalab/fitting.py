"""Least-squares slope fits used to estimate asymptotic rates.

Every quantity in the model is known only up to bounded factors, so all
rate assertions are phrased through fitted slopes of log-transformed data
rather than absolute constants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r2: float


def _linear_fit(x: np.ndarray, y: np.ndarray) -> FitResult:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if x.size < 2:
        raise ValueError("need at least two points to fit a slope")
    coeffs = np.polynomial.polynomial.polyfit(x, y, 1)
    intercept, slope = float(coeffs[0]), float(coeffs[1])
    resid = y - (intercept + slope * x)
    ss_res = float(np.dot(resid, resid))
    centered = y - y.mean()
    ss_tot = float(np.dot(centered, centered))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return FitResult(slope=slope, intercept=intercept, r2=r2)


def fit_linear(x, y) -> FitResult:
    """Fit y = intercept + slope * x; slope is a growth rate per unit x."""
    y = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("linear fit requires finite y")
    return _linear_fit(np.asarray(x, dtype=float), y)


def fit_log_slope(x, y) -> FitResult:
    """Fit log(y) = intercept + slope * x.

    The slope estimates an exponential rate: y ~ C * exp(slope * x).
    All y must be strictly positive.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise ValueError("log-slope fit requires strictly positive finite y")
    return _linear_fit(np.asarray(x, dtype=float), np.log(y))


def fit_power_law(x, y) -> FitResult:
    """Fit log(y) = intercept + slope * log(x); slope is a growth exponent."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0):
        raise ValueError("power-law fit requires strictly positive x")
    if np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise ValueError("power-law fit requires strictly positive finite y")
    return _linear_fit(np.log(x), np.log(y))
