"""End-to-end run: ingest, score, align, split, diagnose, test, report."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .. import sentiment as senti
from ..errors import (
    EmptyTestSegmentError,
    InsufficientObservationsError,
    SentigrangerError,
)
from ..regression import ols_fit
from ..stats import (
    DEFAULT_ALPHA,
    AdfResult,
    Criterion,
    UnitRootVerdict,
    adf_test,
    granger_sweep,
    select_lag,
)
from ..timeseries import (
    DEFAULT_DATE_FORMAT,
    AlignedPair,
    DatedSeries,
    SeriesKind,
    align,
    build_lag_design,
    chrono_split,
    difference,
    min_observations,
    parse_csv,
)
from .report import CausalityReport, OosSummary, OutputFormat, ReportRow, narrative_verdict

log = logging.getLogger(__name__)

SMALL_SAMPLE_WARNING = 50


class Segment(str, Enum):
    TRAIN = "train"
    FULL = "full"


@dataclass(frozen=True)
class RunConfig:
    price_csv: Path
    sentiment_csv: Path | None = None
    headlines_csv: Path | None = None
    model_path: Path | None = None
    max_lag: int = 4
    alpha: float = DEFAULT_ALPHA
    split_ratio: float = 0.8
    test_segment: Segment = Segment.TRAIN
    difference_order: int = 0
    criterion: Criterion = Criterion.AIC
    rng_seed: int = senti.DEFAULT_SEED
    output_format: OutputFormat = OutputFormat.MARKDOWN
    date_format: str = DEFAULT_DATE_FORMAT
    price_column: str = "close"
    score_column: str = "score"
    workers: int | None = None

    def __post_init__(self) -> None:
        if self.max_lag < 1:
            raise ValueError("max_lag must be >= 1")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0 < self.split_ratio <= 1:
            raise ValueError("split_ratio must lie in (0, 1]")
        if self.difference_order < 0:
            raise ValueError("difference_order must be >= 0")
        if (self.sentiment_csv is None) == (self.headlines_csv is None):
            raise ValueError("give exactly one of sentiment_csv or headlines_csv")

    def summary(self) -> dict:
        return {
            "max_lag": self.max_lag,
            "alpha": self.alpha,
            "split_ratio": self.split_ratio,
            "test_segment": self.test_segment.value,
            "difference_order": self.difference_order,
            "criterion": self.criterion.value,
            "rng_seed": self.rng_seed,
        }


def _with_file(exc: SentigrangerError, path: Path) -> SentigrangerError:
    exc.details.setdefault("file", str(path))
    exc.message = f"{path}: {exc.message}"
    exc.args = (exc.message,)
    return exc


def _read_series(path: Path, kind: SeriesKind, column: str, date_format: str) -> DatedSeries:
    try:
        with open(path, "rb") as fh:
            return parse_csv(fh, kind, "date", column, date_format)
    except SentigrangerError as exc:
        raise _with_file(exc, path) from None


def load_sentiment(config: RunConfig) -> DatedSeries:
    if config.sentiment_csv is not None:
        return _read_series(config.sentiment_csv, SeriesKind.SENTIMENT_SCORE,
                            config.score_column, config.date_format)
    assert config.headlines_csv is not None
    if config.model_path is not None:
        with open(config.model_path, encoding="utf-8") as fh:
            model = senti.load_model(fh)
    else:
        model = senti.train(senti.load_demo_corpus(), seed=config.rng_seed)
    try:
        with open(config.headlines_csv, encoding="utf-8-sig", newline="") as fh:
            headlines = senti.read_headlines(fh, date_format=config.date_format)
    except SentigrangerError as exc:
        raise _with_file(exc, config.headlines_csv) from None
    scores = senti.score_many(model, [h.text for h in headlines])
    return senti.daily_aggregate(zip((h.date for h in headlines), scores))


def difference_price(pair: AlignedPair, order: int) -> AlignedPair:
    """Difference the close price over the aligned sample; sentiment is trimmed to match."""
    if order == 0:
        return pair
    diffed = difference(DatedSeries(SeriesKind.CLOSE_PRICE, pair.dates, pair.y), order)
    return AlignedPair(diffed.dates, diffed.values, pair.x[order:])


def oos_compare(pair: AlignedPair, lag: int, split_ratio: float) -> tuple[float, float]:
    """One-step-ahead RMSE of the own-lag and the own-plus-cross-lag models.

    Both models are fit on the chronological train segment and predict each
    test observation from its realised lags, so the first test rows use the
    last train observations as regressors.
    """
    split = chrono_split(pair, split_ratio)
    if split.test is None:
        raise EmptyTestSegmentError("split leaves no test observations", ratio=split_ratio)
    n_train = len(split.train)
    train_design = build_lag_design(split.train, lag)
    full = build_lag_design(pair, lag)
    test_rows = slice(n_train - lag, None)

    rmse = []
    for train_X, full_X in ((train_design.restricted, full.restricted),
                            (train_design.unrestricted, full.unrestricted)):
        fit = ols_fit(train_X, train_design.target)
        err = full.target[test_rows] - fit.predict(full_X[test_rows])
        rmse.append(math.sqrt(float(np.mean(err ** 2))))
    return rmse[0], rmse[1]


def _try_adf(series: DatedSeries) -> AdfResult | None:
    try:
        return adf_test(series)
    except SentigrangerError as exc:
        log.warning("ADF skipped for %s: %s", series.kind.value, exc.message)
        return None


def run_pipeline(config: RunConfig) -> CausalityReport:
    price = _read_series(config.price_csv, SeriesKind.CLOSE_PRICE,
                         config.price_column, config.date_format)
    sentiment = load_sentiment(config)
    aligned = align(price, sentiment)
    pair = difference_price(aligned, config.difference_order)
    split = chrono_split(pair, config.split_ratio)
    tested = split.train if config.test_segment is Segment.TRAIN else pair
    n = len(tested)

    required = min_observations(config.max_lag)
    if n < required:
        raise InsufficientObservationsError(n, config.max_lag, required=required)
    warnings = []
    if n < SMALL_SAMPLE_WARNING:
        msg = f"only {n} observations in the tested segment; results may be unreliable"
        log.warning(msg)
        warnings.append(msg)

    adf = {
        "close_price": _try_adf(DatedSeries(SeriesKind.CLOSE_PRICE, tested.dates, tested.y)),
        "sentiment": _try_adf(DatedSeries(SeriesKind.SENTIMENT_SCORE, tested.dates, tested.x)),
    }
    for name, res in adf.items():
        if res is not None and res.verdict is UnitRootVerdict.FAIL_TO_REJECT:
            warnings.append(f"{name} looks non-stationary (ADF {res.test_stat:.4f}); "
                            f"consider a difference order")

    try:
        selected = select_lag(tested, config.max_lag, config.criterion)
    except SentigrangerError as exc:
        log.warning("lag selection failed: %s", exc.message)
        selected = None

    cells = granger_sweep(tested, config.max_lag, workers=config.workers)
    rows = tuple(ReportRow.from_result(c, config.alpha) for c in cells)

    oos = None
    if split.test is not None:
        lag = selected or 1
        try:
            r_rmse, u_rmse = oos_compare(pair, lag, config.split_ratio)
            oos = OosSummary(lag, r_rmse, u_rmse, len(split.test))
        except SentigrangerError as exc:
            log.warning("out-of-sample comparison skipped: %s", exc.message)

    sentiment_source = config.sentiment_csv or config.headlines_csv
    metadata = {
        "price_file": Path(config.price_csv).name,
        "sentiment_file": Path(sentiment_source).name,
        "sentiment_source": "scores" if config.sentiment_csv is not None else "headlines",
        "config": config.summary(),
        "n_price": len(price),
        "n_sentiment": len(sentiment),
        "n_aligned": len(aligned),
        "n_train": len(split.train),
        "n_test": 0 if split.test is None else len(split.test),
        "n_tested": n,
        "date_range": [tested.dates[0].isoformat(), tested.dates[-1].isoformat()],
        "warnings": warnings,
    }
    return CausalityReport(
        alpha=config.alpha,
        rows=rows,
        narrative=narrative_verdict(rows, config.alpha),
        metadata=metadata,
        adf=adf,
        selected_lag=selected,
        criterion=config.criterion,
        oos=oos,
    )
