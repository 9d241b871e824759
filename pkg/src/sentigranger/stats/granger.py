"""Bivariate Granger causality F-tests, lag selection and the decision rule."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum


from ..errors import DegenerateResidualsError, DomainError, SentigrangerError
from ..regression import ols_fit
from ..timeseries import AlignedPair, build_lag_design
from .special import f_sf

DEFAULT_ALPHA = 0.05
_CLAMP_TOL = 1e-12
_DEGENERATE_TOL = 1e-14


class Direction(str, Enum):
    """``X_TO_Y``: sentiment helps predict close price. ``Y_TO_X``: the reverse."""

    X_TO_Y = "x_to_y"
    Y_TO_X = "y_to_x"


class Verdict(str, Enum):
    REJECT_NULL = "reject_null"
    FAIL_TO_REJECT_NULL = "fail_to_reject_null"


class Criterion(str, Enum):
    AIC = "aic"
    BIC = "bic"


@dataclass(frozen=True)
class GrangerResult:
    direction: Direction
    lag: int
    f_stat: float
    df_num: int
    df_den: int
    p_value: float
    n_used: int


@dataclass(frozen=True)
class GrangerFailure:
    """A sweep cell whose test could not be run."""

    direction: Direction
    lag: int
    error: str
    message: str


@dataclass(frozen=True)
class Decision:
    verdict: Verdict
    alpha: float
    p_value: float


def _oriented(pair: AlignedPair, direction: Direction) -> AlignedPair:
    return pair if direction is Direction.X_TO_Y else pair.swapped()


def granger_test(pair: AlignedPair, direction: Direction, lag: int) -> GrangerResult:
    """F-test of whether lags of the cause add predictive power for the effect.

    For ``X_TO_Y`` the effect is ``pair.y``; for ``Y_TO_X`` roles swap. Each
    lag uses its own maximal sample of ``n - lag`` rows.
    """
    design = build_lag_design(_oriented(pair, direction), lag)
    restricted = ols_fit(design.restricted, design.target)
    unrestricted = ols_fit(design.unrestricted, design.target)

    m = design.n_rows
    df_num = lag
    df_den = m - 1 - 2 * lag
    scale = float(design.target @ design.target)
    if unrestricted.rss <= _DEGENERATE_TOL * scale:
        raise DegenerateResidualsError(
            f"unrestricted model fits exactly at lag {lag}; F is undefined",
            lag=lag, direction=direction.value)

    gain = restricted.rss - unrestricted.rss
    if gain < 0:
        if gain < -_CLAMP_TOL * restricted.rss:
            raise ArithmeticError(
                f"restricted RSS below unrestricted beyond round-off ({gain!r})")
        gain = 0.0
    f_stat = (gain / df_num) / (unrestricted.rss / df_den)
    p_value = min(1.0, max(0.0, f_sf(f_stat, df_num, df_den)))
    return GrangerResult(direction, lag, f_stat, df_num, df_den, p_value, m)


def granger_sweep(
    pair: AlignedPair, max_lag: int, workers: int | None = None
) -> list[GrangerResult | GrangerFailure]:
    """Both directions at lags ``1..max_lag``: ``X_TO_Y`` ascending, then ``Y_TO_X``.

    A cell that fails is returned as a :class:`GrangerFailure` in its slot.
    With ``workers > 1`` cells are evaluated on a thread pool; order and
    values do not depend on scheduling.
    """
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    cells = [(d, p) for d in (Direction.X_TO_Y, Direction.Y_TO_X) for p in range(1, max_lag + 1)]

    def run(cell: tuple[Direction, int]) -> GrangerResult | GrangerFailure:
        direction, lag = cell
        try:
            return granger_test(pair, direction, lag)
        except SentigrangerError as exc:
            return GrangerFailure(direction, lag, type(exc).__name__, exc.message)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, cells))
    return [run(c) for c in cells]


def information_criterion(rss: float, m: int, k: int, criterion: Criterion) -> float:
    penalty = 2.0 * k if criterion is Criterion.AIC else k * math.log(m)
    return m * math.log(rss / m) + penalty


def lag_criteria(pair: AlignedPair, max_lag: int, criterion: Criterion = Criterion.AIC) -> list[float]:
    """Criterion of the unrestricted model at lags ``1..max_lag`` on the common sample."""
    values = []
    for lag in range(1, max_lag + 1):
        design = build_lag_design(pair, lag, sample_start=max_lag)
        fit = ols_fit(design.unrestricted, design.target)
        values.append(information_criterion(fit.rss, fit.n_rows, fit.n_cols, criterion))
    return values


def select_lag(pair: AlignedPair, max_lag: int, criterion: Criterion = Criterion.AIC) -> int:
    """Lag in ``1..max_lag`` minimising the criterion; ties go to the smaller lag."""
    values = lag_criteria(pair, max_lag, criterion)
    best = 0
    for i, v in enumerate(values):
        if v < values[best]:
            best = i
    return best + 1


def decide(p_value: float, alpha: float = DEFAULT_ALPHA) -> Decision:
    """Reject the null iff ``p_value < alpha`` (strict, so ``p == alpha`` does not reject)."""
    if not 0.0 <= p_value <= 1.0:
        raise DomainError(f"p-value must lie in [0, 1], got {p_value}", p_value=p_value)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}", alpha=alpha)
    verdict = Verdict.REJECT_NULL if p_value < alpha else Verdict.FAIL_TO_REJECT_NULL
    return Decision(verdict, alpha, p_value)
