"""Dated series ingestion, alignment, differencing, splitting and lag designs.

Lags are positional over the aligned sample: a missing trading day is simply
an absent row, never filled. All containers are immutable after construction.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from datetime import date, datetime
from enum import Enum
from fractions import Fraction
from typing import BinaryIO, Iterable, Sequence, TextIO

import numpy as np

from .errors import (
    DuplicateDateError,
    EmptyIntersectionError,
    EmptySeriesError,
    EmptyTrainError,
    InsufficientObservationsError,
    InvalidRatioError,
    MissingColumnError,
    SeriesTooShortError,
    UnparsableDateError,
    UnparsableValueError,
)

DEFAULT_DATE_FORMAT = "%Y-%m-%d"


class SeriesKind(str, Enum):
    CLOSE_PRICE = "close_price"
    SENTIMENT_SCORE = "sentiment_score"


def _frozen(values: Iterable[float]) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.flags.writeable = False
    return arr


def _check_increasing(dates: Sequence[date]) -> None:
    for prev, cur in zip(dates, dates[1:]):
        if not prev < cur:
            raise ValueError(f"dates must be strictly increasing: {prev} then {cur}")


@dataclass(frozen=True, eq=False)
class DatedSeries:
    """Strictly date-ordered observations of one quantity."""

    kind: SeriesKind
    dates: tuple[date, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "values", _frozen(self.values))
        if len(self.dates) == 0:
            raise EmptySeriesError("a series needs at least one observation")
        if self.values.shape != (len(self.dates),):
            raise ValueError("dates and values differ in length")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("series values must be finite")
        _check_increasing(self.dates)

    def __len__(self) -> int:
        return len(self.dates)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DatedSeries):
            return NotImplemented
        return (self.kind == other.kind and self.dates == other.dates
                and np.array_equal(self.values, other.values))


@dataclass(frozen=True, eq=False)
class AlignedPair:
    """Close price ``y`` and sentiment ``x`` observed on the same dates."""

    dates: tuple[date, ...]
    y: np.ndarray
    x: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "y", _frozen(self.y))
        object.__setattr__(self, "x", _frozen(self.x))
        n = len(self.dates)
        if n == 0:
            raise EmptySeriesError("an aligned pair needs at least one observation")
        if self.y.shape != (n,) or self.x.shape != (n,):
            raise ValueError("dates, y and x must have equal length")
        _check_increasing(self.dates)

    def __len__(self) -> int:
        return len(self.dates)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlignedPair):
            return NotImplemented
        return (self.dates == other.dates and np.array_equal(self.y, other.y)
                and np.array_equal(self.x, other.x))

    def swapped(self) -> AlignedPair:
        """Same pair with the roles of ``y`` and ``x`` exchanged."""
        return AlignedPair(self.dates, self.x, self.y)

    def slice(self, start: int, stop: int | None = None) -> AlignedPair:
        return AlignedPair(self.dates[start:stop], self.y[start:stop], self.x[start:stop])


@dataclass(frozen=True, eq=False)
class LagDesign:
    """Target and nested regressor matrices for one lag order.

    Column layout of ``unrestricted``: intercept, ``y`` lags 1..p, ``x`` lags
    1..p, most recent lag first. ``restricted`` is its first ``1 + p`` columns.
    """

    lag: int
    target: np.ndarray
    restricted: np.ndarray
    unrestricted: np.ndarray

    @property
    def n_rows(self) -> int:
        return self.target.shape[0]


@dataclass(frozen=True)
class SplitPair:
    train: AlignedPair
    test: AlignedPair | None
    ratio: float


def _open_text(source: BinaryIO | TextIO | bytes | str) -> TextIO:
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8-sig"))
    if isinstance(source, str):
        return io.StringIO(source)
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding="utf-8-sig", newline="")


def parse_csv(
    source: BinaryIO | TextIO | bytes | str,
    kind: SeriesKind,
    date_column: str = "date",
    value_column: str = "value",
    date_format: str = DEFAULT_DATE_FORMAT,
) -> DatedSeries:
    """Read one dated column pair from CSV text and sort it by date.

    Duplicate dates are an error for close prices. Sentiment files may carry
    several rows per day (e.g. one per headline); those collapse to their
    per-day mean.

    Row numbers in errors are 1-based data rows (the header is row 0).
    """
    reader = csv.DictReader(_open_text(source))
    fields = reader.fieldnames or []
    for col in (date_column, value_column):
        if col not in fields:
            raise MissingColumnError(col, list(fields))

    rows: list[tuple[date, float]] = []
    for i, rec in enumerate(reader, start=1):
        raw_date = (rec.get(date_column) or "").strip()
        raw_value = (rec.get(value_column) or "").strip()
        try:
            day = datetime.strptime(raw_date, date_format).date()
        except ValueError:
            raise UnparsableDateError(i, raw_date, date_format) from None
        try:
            value = float(raw_value)
        except ValueError:
            raise UnparsableValueError(i, raw_value) from None
        if not math.isfinite(value):
            raise UnparsableValueError(i, raw_value)
        rows.append((day, value))

    if not rows:
        raise EmptySeriesError("CSV contains no data rows")
    rows.sort(key=lambda r: r[0])

    dates: list[date] = []
    values: list[float] = []
    counts: list[int] = []
    for day, value in rows:
        if dates and dates[-1] == day:
            if kind is SeriesKind.CLOSE_PRICE:
                raise DuplicateDateError(day)
            values[-1] += value
            counts[-1] += 1
        else:
            dates.append(day)
            values.append(value)
            counts.append(1)
    return DatedSeries(kind, tuple(dates), np.array(values) / np.array(counts))


def write_csv(
    series: DatedSeries,
    sink: TextIO,
    date_column: str = "date",
    value_column: str = "value",
    date_format: str = DEFAULT_DATE_FORMAT,
) -> None:
    """Write ``series`` in the schema :func:`parse_csv` reads; values keep full precision."""
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow([date_column, value_column])
    for day, value in zip(series.dates, series.values):
        writer.writerow([day.strftime(date_format), repr(float(value))])


def serialize_csv(series: DatedSeries, **columns: str) -> bytes:
    buf = io.StringIO()
    write_csv(series, buf, **columns)
    return buf.getvalue().encode("utf-8")


def align(y: DatedSeries, x: DatedSeries) -> AlignedPair:
    """Inner join on exact calendar-day equality."""
    x_index = {d: i for i, d in enumerate(x.dates)}
    y_rows = [i for i, d in enumerate(y.dates) if d in x_index]
    if not y_rows:
        raise EmptyIntersectionError("the two series share no dates")
    x_rows = [x_index[y.dates[i]] for i in y_rows]
    return AlignedPair(
        tuple(y.dates[i] for i in y_rows),
        y.values[y_rows],
        x.values[x_rows],
    )


def difference(series: DatedSeries, order: int) -> DatedSeries:
    """``order``-th difference; each value is dated at the later observation."""
    if order < 0:
        raise ValueError("difference order must be non-negative")
    if len(series) <= order:
        raise SeriesTooShortError(
            f"series of length {len(series)} cannot be differenced {order} times",
            n=len(series), order=order)
    if order == 0:
        return series
    return DatedSeries(series.kind, series.dates[order:], np.diff(series.values, n=order))


def min_observations(lag: int) -> int:
    """Smallest sample supporting an unrestricted fit with positive residual df."""
    return 3 * lag + 1


def _lag_columns(v: np.ndarray, lag: int, start: int) -> np.ndarray:
    n = v.shape[0]
    return np.column_stack([v[start - j:n - j] for j in range(1, lag + 1)])


def build_lag_design(pair: AlignedPair, lag: int, sample_start: int | None = None) -> LagDesign:
    """Granger regressions of ``pair.y`` on its own lags, then also on ``pair.x`` lags.

    Parameters
    ----------
    pair : AlignedPair
    lag : int
        Lag order ``p >= 1``.
    sample_start : int, optional
        First row of ``pair`` used as a target. Defaults to ``lag`` (own
        maximal sample); pass a larger lag bound to compare several orders on
        a common sample.
    """
    if lag < 1:
        raise ValueError("lag must be >= 1")
    n = len(pair)
    start = lag if sample_start is None else sample_start
    if start < lag:
        raise ValueError("sample_start must be at least lag")
    if n - start < 1 + 2 * lag:
        raise InsufficientObservationsError(n, lag, required=start + 1 + 2 * lag)
    m = n - start
    ones = np.ones((m, 1))
    ylags = _lag_columns(pair.y, lag, start)
    xlags = _lag_columns(pair.x, lag, start)
    restricted = np.hstack([ones, ylags])
    unrestricted = np.hstack([restricted, xlags])
    target = pair.y[start:].copy()
    for a in (target, restricted, unrestricted):
        a.flags.writeable = False
    return LagDesign(lag, target, restricted, unrestricted)


def _split_size(ratio: float, n: int) -> int:
    # decimal reading of the ratio so that e.g. 0.29 * 100 gives 29, not 28
    return math.floor(Fraction(repr(float(ratio))) * n)


def chrono_split(pair: AlignedPair, ratio: float) -> SplitPair:
    """First ``floor(ratio * n)`` observations train, the rest test; no shuffling."""
    if not 0 < ratio <= 1:
        raise InvalidRatioError(f"split ratio must lie in (0, 1], got {ratio}", ratio=ratio)
    n = len(pair)
    k = _split_size(ratio, n)
    if k == 0:
        raise EmptyTrainError(f"ratio {ratio} leaves no training rows out of {n}", n=n)
    test = pair.slice(k) if k < n else None
    return SplitPair(pair.slice(0, k), test, ratio)
