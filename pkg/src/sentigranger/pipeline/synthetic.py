"""Seeded synthetic (close price, sentiment) pairs with a known causal link.

Algorithm, given ``(n, coupling, noise_sd, seed, coupling_lag)``::

    rng = numpy.random.default_rng(seed)          # PCG64
    x   = rng.standard_normal(n)                  # drawn first
    eps = rng.normal(0.0, noise_sd, n)            # drawn second
    y[0..coupling_lag-1] = 0
    y[t] = 0.5 * y[t-1] + coupling * x[t-coupling_lag] + eps[t]

PCG64 and numpy's normal sampler are bit-reproducible across platforms.
Dates are consecutive weekdays from ``start`` (skipping Saturdays and Sundays).
"""
from __future__ import annotations

import math
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from ..errors import DomainError
from ..timeseries import AlignedPair, DatedSeries, SeriesKind, write_csv

DEFAULT_START = date(2015, 5, 4)
AR_COEFFICIENT = 0.5
PRICE_FILE = "price.csv"
SENTIMENT_FILE = "sentiment.csv"


def weekdays(start: date, n: int) -> tuple[date, ...]:
    out = []
    day = start
    while len(out) < n:
        if day.weekday() < 5:
            out.append(day)
        day += timedelta(days=1)
    return tuple(out)


def gen_synthetic(
    n: int,
    coupling: float,
    noise_sd: float,
    seed: int,
    coupling_lag: int = 1,
    start: date = DEFAULT_START,
) -> AlignedPair:
    if n < 50:
        raise DomainError(f"synthetic series need n >= 50, got {n}", n=n)
    if not noise_sd > 0 or not math.isfinite(noise_sd) or not math.isfinite(coupling):
        raise DomainError("noise_sd must be positive and coupling finite",
                          noise_sd=noise_sd, coupling=coupling)
    if coupling_lag < 1:
        raise DomainError("coupling_lag must be >= 1", coupling_lag=coupling_lag)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    eps = rng.normal(0.0, noise_sd, n)
    y = np.zeros(n)
    for t in range(coupling_lag, n):
        y[t] = AR_COEFFICIENT * y[t - 1] + coupling * x[t - coupling_lag] + eps[t]
    return AlignedPair(weekdays(start, n), y, x)


def write_pair(pair: AlignedPair, out_dir: Path) -> tuple[Path, Path]:
    """Write ``price.csv`` (``date,close``) and ``sentiment.csv`` (``date,score``)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    price = out_dir / PRICE_FILE
    sentiment = out_dir / SENTIMENT_FILE
    with price.open("w", encoding="utf-8", newline="") as fh:
        write_csv(DatedSeries(SeriesKind.CLOSE_PRICE, pair.dates, pair.y), fh, value_column="close")
    with sentiment.open("w", encoding="utf-8", newline="") as fh:
        write_csv(DatedSeries(SeriesKind.SENTIMENT_SCORE, pair.dates, pair.x), fh, value_column="score")
    return price, sentiment
