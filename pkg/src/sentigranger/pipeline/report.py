"""Causality report model, narrative verdict and Markdown/JSON rendering.

JSON schema (``schema_version`` 1), all keys sorted, floats at full precision::

    {
      "schema_version": 1,
      "alpha": float,
      "metadata": {str: any},
      "adf": {"close_price": ADF | null, "sentiment": ADF | null},
      "selected_lag": int | null,
      "criterion": "aic" | "bic",
      "rows": [Row, ...],          # x_to_y lags ascending, then y_to_x
      "oos": OOS | null,
      "narrative": str
    }
    ADF = {"test_stat", "lags_used", "n_used", "critical_values": {"1%","5%","10%"}, "verdict"}
    Row = {"direction", "lag", "f_stat", "df_num", "df_den", "p_value", "n_used",
           "verdict", "error"}    # numeric fields null when the cell failed
    OOS = {"lag", "rmse_restricted", "rmse_unrestricted", "n_test"}
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Iterable, Mapping

from ..stats import (
    AdfResult,
    Criterion,
    Direction,
    GrangerFailure,
    GrangerResult,
    Verdict,
    decide,
)

SCHEMA_VERSION = 1


class OutputFormat(str, Enum):
    MARKDOWN = "markdown"
    JSON = "json"


@dataclass(frozen=True)
class ReportRow:
    direction: Direction
    lag: int
    p_value: float | None
    verdict: Verdict | None
    f_stat: float | None = None
    df_num: int | None = None
    df_den: int | None = None
    n_used: int | None = None
    error: str | None = None

    @classmethod
    def from_result(cls, cell: GrangerResult | GrangerFailure, alpha: float) -> ReportRow:
        if isinstance(cell, GrangerFailure):
            return cls(cell.direction, cell.lag, None, None,
                       error=f"{cell.error}: {cell.message}")
        verdict = decide(cell.p_value, alpha).verdict
        return cls(cell.direction, cell.lag, cell.p_value, verdict,
                   cell.f_stat, cell.df_num, cell.df_den, cell.n_used)


@dataclass(frozen=True)
class OosSummary:
    lag: int
    rmse_restricted: float
    rmse_unrestricted: float
    n_test: int


@dataclass(frozen=True)
class CausalityReport:
    alpha: float
    rows: tuple[ReportRow, ...]
    narrative: str
    metadata: dict[str, Any] = field(default_factory=dict)
    adf: dict[str, AdfResult | None] = field(
        default_factory=lambda: {"close_price": None, "sentiment": None})
    selected_lag: int | None = None
    criterion: Criterion = Criterion.AIC
    oos: OosSummary | None = None
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(self.rows))
        lags = {d: [r.lag for r in self.rows if r.direction is d] for d in Direction}
        if lags[Direction.X_TO_Y] != lags[Direction.Y_TO_X]:
            raise ValueError("both directions must cover the same lags")

    def table(self, direction: Direction) -> list[ReportRow]:
        return [r for r in self.rows if r.direction is direction]

    @property
    def max_lag(self) -> int:
        return len(self.table(Direction.X_TO_Y))


def narrative_verdict(rows: Iterable[ReportRow], alpha: float) -> str:
    """Summary line: a direction is named only if it rejects at every lag while
    the reverse rejects at none. A failed cell counts as not rejecting."""
    rows = list(rows)

    def rejects(direction: Direction) -> list[bool]:
        return [r.verdict is Verdict.REJECT_NULL for r in rows if r.direction is direction]

    fwd, rev = rejects(Direction.X_TO_Y), rejects(Direction.Y_TO_X)
    level = f"alpha = {alpha:g}"
    if fwd and all(fwd) and not any(rev):
        return (f"Sentiment score Granger-causes close price: the null is rejected at every "
                f"tested lag in that direction and at none in the reverse direction ({level}).")
    if rev and all(rev) and not any(fwd):
        return (f"Close price Granger-causes sentiment score: the null is rejected at every "
                f"tested lag in that direction and at none in the reverse direction ({level}).")
    return (f"Inconclusive/bidirectional: sentiment -> price rejects at {sum(fwd)} of "
            f"{len(fwd)} lags, price -> sentiment at {sum(rev)} of {len(rev)} lags ({level}).")


# ---- JSON ---------------------------------------------------------------------

def _plain(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def _adf_to_dict(res: AdfResult | None) -> dict | None:
    if res is None:
        return None
    return {"test_stat": res.test_stat, "lags_used": res.lags_used, "n_used": res.n_used,
            "critical_values": dict(res.critical_values), "verdict": res.verdict.value}


def report_to_dict(report: CausalityReport) -> dict[str, Any]:
    return {
        "schema_version": report.schema_version,
        "alpha": report.alpha,
        "metadata": _plain(report.metadata),
        "adf": {k: _adf_to_dict(v) for k, v in report.adf.items()},
        "selected_lag": report.selected_lag,
        "criterion": report.criterion.value,
        "rows": [_plain(asdict(r)) for r in report.rows],
        "oos": None if report.oos is None else asdict(report.oos),
        "narrative": report.narrative,
    }


def report_from_dict(payload: Mapping[str, Any]) -> CausalityReport:
    version = payload.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema_version {version!r}")
    rows = []
    for r in payload["rows"]:
        r = dict(r)
        r["direction"] = Direction(r["direction"])
        r["verdict"] = None if r["verdict"] is None else Verdict(r["verdict"])
        rows.append(ReportRow(**r))
    adf = {}
    for name, a in payload["adf"].items():
        adf[name] = None if a is None else AdfResult(
            a["test_stat"], a["lags_used"], a["n_used"], dict(a["critical_values"]))
    oos = payload.get("oos")
    return CausalityReport(
        alpha=payload["alpha"],
        rows=tuple(rows),
        narrative=payload["narrative"],
        metadata=dict(payload["metadata"]),
        adf=adf,
        selected_lag=payload["selected_lag"],
        criterion=Criterion(payload["criterion"]),
        oos=None if oos is None else OosSummary(**oos),
        schema_version=version,
    )


def parse_json_report(data: bytes | str) -> CausalityReport:
    return report_from_dict(json.loads(data))


# ---- Markdown -----------------------------------------------------------------

_PARTS = {
    Direction.X_TO_Y: ("Part 1: sentiment score -> close price",
                       "Sentiment score does not Granger-cause close price.",
                       "Sentiment score Granger-causes close price."),
    Direction.Y_TO_X: ("Part 2: close price -> sentiment score",
                       "Close price does not Granger-cause sentiment score.",
                       "Close price Granger-causes sentiment score."),
}
_VERDICT_TEXT = {Verdict.REJECT_NULL: "reject null",
                 Verdict.FAIL_TO_REJECT_NULL: "fail to reject null"}


def _fmt(value: float | None, digits: int = 4) -> str:
    return "n/a" if value is None else f"{value:.{digits}f}"


def _table(rows: list[ReportRow]) -> list[str]:
    lines = ["| Lag | F statistic | df | p value | Decision |",
             "|---|---|---|---|---|"]
    for r in rows:
        df = "n/a" if r.df_num is None else f"({r.df_num}, {r.df_den})"
        decision = _VERDICT_TEXT[r.verdict] if r.verdict is not None else f"error: {r.error}"
        lines.append(f"| Lag {r.lag} | {_fmt(r.f_stat)} | {df} | {_fmt(r.p_value)} | {decision} |")
    return lines


def _metadata_lines(meta: Mapping[str, Any]) -> list[str]:
    lines = []
    for key in sorted(meta):
        if key == "warnings":
            continue
        value = meta[key]
        if isinstance(value, Mapping):
            value = ", ".join(f"{k}={_plain(v)}" for k, v in sorted(value.items()))
        elif isinstance(value, (list, tuple)):
            value = " to ".join(str(v) for v in value) if key == "date_range" else \
                ", ".join(str(v) for v in value)
        lines.append(f"- {key.replace('_', ' ')}: {value}")
    for w in meta.get("warnings", []):
        lines.append(f"- WARNING: {w}")
    return lines


def render_markdown(report: CausalityReport) -> str:
    out = ["# Granger causality report", ""]
    if report.metadata:
        out += ["## Inputs", ""] + _metadata_lines(report.metadata) + [""]

    out += ["## Stationarity (augmented Dickey-Fuller, constant only)", ""]
    computed = {k: v for k, v in report.adf.items() if v is not None}
    if not computed:
        out += ["ADF diagnostics not computed.", ""]
    else:
        out += ["| Series | ADF statistic | Lags | 1% | 5% | 10% | Verdict at 5% |",
                "|---|---|---|---|---|---|---|"]
        for name, res in report.adf.items():
            if res is None:
                out.append(f"| {name} | not computed | | | | | |")
                continue
            cv = res.critical_values
            out.append(f"| {name} | {res.test_stat:.4f} | {res.lags_used} | {cv['1%']:.4f} | "
                       f"{cv['5%']:.4f} | {cv['10%']:.4f} | {res.verdict.value.replace('_', ' ')} |")
        out.append("")

    out += ["## Lag order", ""]
    if report.selected_lag is None:
        out += [f"Lag selection ({report.criterion.value.upper()}) not computed.", ""]
    else:
        out += [f"Selected lag ({report.criterion.value.upper()}): {report.selected_lag}", ""]

    for direction in Direction:
        title, null, alt = _PARTS[direction]
        out += [f"## {title}", "", f"Null hypothesis: {null}", "",
                f"Alternative hypothesis: {alt}", ""]
        out += _table(report.table(direction)) + [""]

    if report.oos is not None:
        o = report.oos
        out += ["## Out-of-sample one-step forecasts", "",
                f"Lag {o.lag}, {o.n_test} test rows: RMSE own lags only {o.rmse_restricted:.6f}, "
                f"with sentiment lags {o.rmse_unrestricted:.6f}", ""]

    out += ["## Conclusion", "", report.narrative, ""]
    return "\n".join(out)


def render_report(report: CausalityReport, fmt: OutputFormat = OutputFormat.MARKDOWN) -> bytes:
    if fmt is OutputFormat.JSON:
        text = json.dumps(report_to_dict(report), indent=2, sort_keys=True, allow_nan=False) + "\n"
    else:
        text = render_markdown(report)
    return text.encode("utf-8")
