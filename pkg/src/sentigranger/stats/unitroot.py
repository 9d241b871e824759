"""Augmented Dickey-Fuller test, constant-only case.

Critical values come from a small table evaluated on the MacKinnon (2010)
constant-only response surface

    cv(T) = b0 + b1/T + b2/T^2 + b3/T^3

    level   b0        b1        b2        b3
    1%     -3.43035  -6.5393   -16.786   -79.433
    5%     -2.86154  -2.8903    -4.234   -40.040
    10%    -2.56677  -1.5384    -2.809     0.0

at T = 10, 15, 20, 25, 50, 100, 250, 500, 1000 and infinity, then
interpolated linearly in 1/T (extrapolated along the last segment below 10).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..errors import ConstantSeriesError, SeriesTooShortError
from ..regression import coefficient_std_errors, ols_fit
from ..timeseries import DatedSeries
from .granger import Criterion, information_criterion

MIN_LENGTH = 20
LEVELS = ("1%", "5%", "10%")

_SURFACE = {
    "1%": (-3.43035, -6.5393, -16.786, -79.433),
    "5%": (-2.86154, -2.8903, -4.234, -40.040),
    "10%": (-2.56677, -1.5384, -2.809, 0.0),
}
_TABLE_SIZES = (10, 15, 20, 25, 50, 100, 250, 500, 1000)


def _surface(level: str, t: float) -> float:
    b0, b1, b2, b3 = _SURFACE[level]
    inv = 1.0 / t
    return b0 + b1 * inv + b2 * inv ** 2 + b3 * inv ** 3


# inverse sample size ascending: infinity first
_INV_GRID = np.array([0.0] + [1.0 / t for t in reversed(_TABLE_SIZES)])
CRITICAL_TABLE = {
    level: np.array([_SURFACE[level][0]] + [_surface(level, t) for t in reversed(_TABLE_SIZES)])
    for level in LEVELS
}


class UnitRootVerdict(str, Enum):
    REJECT_UNIT_ROOT = "reject_unit_root"
    FAIL_TO_REJECT = "fail_to_reject"


@dataclass(frozen=True)
class AdfResult:
    test_stat: float
    lags_used: int
    n_used: int
    critical_values: dict[str, float] = field(default_factory=dict)

    @property
    def verdict(self) -> UnitRootVerdict:
        if self.test_stat < self.critical_values["5%"]:
            return UnitRootVerdict.REJECT_UNIT_ROOT
        return UnitRootVerdict.FAIL_TO_REJECT


def critical_values(nobs: int) -> dict[str, float]:
    inv = 1.0 / nobs
    out = {}
    for level in LEVELS:
        table = CRITICAL_TABLE[level]
        if inv <= _INV_GRID[-1]:
            out[level] = float(np.interp(inv, _INV_GRID, table))
        else:
            slope = (table[-1] - table[-2]) / (_INV_GRID[-1] - _INV_GRID[-2])
            out[level] = float(table[-1] + slope * (inv - _INV_GRID[-1]))
    return out


def default_max_lag(n: int) -> int:
    """Schwert's rule ``floor(12 (n/100)^(1/4))``."""
    return int(math.floor(12.0 * (n / 100.0) ** 0.25))


def _adf_design(levels: np.ndarray, lag: int, start: int) -> tuple[np.ndarray, np.ndarray]:
    # row i regresses d[i] on [1, s[i], d[i-1], ..., d[i-lag]] for i >= start
    d = np.diff(levels)
    rows = d.shape[0] - start
    cols = [np.ones(rows), levels[start:start + rows]]
    cols += [d[start - j:start - j + rows] for j in range(1, lag + 1)]
    return np.column_stack(cols), d[start:]


def adf_test(series: DatedSeries, max_lag: int | None = None) -> AdfResult:
    """ADF t-ratio on the lagged level, lag order chosen by AIC.

    All candidate lags ``0..max_lag`` are compared on the sample available at
    ``max_lag``; the chosen order is then refit on its own maximal sample.
    """
    values = np.asarray(series.values, dtype=np.float64)
    n = values.shape[0]
    if n < MIN_LENGTH:
        raise SeriesTooShortError(f"ADF needs at least {MIN_LENGTH} observations, got {n}",
                                  n=n, required=MIN_LENGTH)
    if np.ptp(values) == 0.0:
        raise ConstantSeriesError("series has zero variance")
    if max_lag is None:
        max_lag = default_max_lag(n)
    # keep at least 10 residual degrees of freedom at the largest lag
    max_lag = max(0, min(max_lag, (n - 1 - 10 - 2) // 2))

    best_lag, best_ic = 0, math.inf
    for lag in range(max_lag + 1):
        X, y = _adf_design(values, lag, max_lag)
        fit = ols_fit(X, y)
        ic = information_criterion(fit.rss, fit.n_rows, fit.n_cols, Criterion.AIC)
        if ic < best_ic:
            best_lag, best_ic = lag, ic

    X, y = _adf_design(values, best_lag, best_lag)
    fit = ols_fit(X, y)
    se = coefficient_std_errors(fit)
    stat = float(fit.coefficients[1] / se[1])
    return AdfResult(stat, best_lag, fit.n_rows, critical_values(fit.n_rows))
