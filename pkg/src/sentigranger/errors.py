"""Exception hierarchy shared by every module.

Each error carries the structured fields a caller needs to react (row numbers,
ranks, minimal sample sizes) and renders to a machine-readable dict for the CLI.
"""
from __future__ import annotations

from typing import Any


class SentigrangerError(Exception):
    """Base class; ``details`` holds the structured context of the failure."""

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"error": type(self).__name__, "message": self.message}
        out.update({k: (str(v) if not isinstance(v, (int, float, str, type(None))) else v)
                    for k, v in self.details.items()})
        return out


class DomainError(SentigrangerError, ValueError):
    pass


class ShapeMismatchError(SentigrangerError, ValueError):
    pass


# timeseries
class MissingColumnError(SentigrangerError):
    def __init__(self, column: str, available: list[str]) -> None:
        super().__init__(f"column {column!r} not found (have {available})",
                         column=column, available=",".join(available))


class UnparsableDateError(SentigrangerError):
    def __init__(self, row: int, raw: str, fmt: str) -> None:
        super().__init__(f"row {row}: cannot parse date {raw!r} with format {fmt!r}",
                         row=row, raw=raw)


class UnparsableValueError(SentigrangerError):
    def __init__(self, row: int, raw: str) -> None:
        super().__init__(f"row {row}: cannot parse value {raw!r}", row=row, raw=raw)


class DuplicateDateError(SentigrangerError):
    def __init__(self, date: Any) -> None:
        super().__init__(f"duplicate date {date}", date=date)


class EmptySeriesError(SentigrangerError):
    pass


class EmptyIntersectionError(SentigrangerError):
    pass


class SeriesTooShortError(SentigrangerError):
    pass


class InsufficientObservationsError(SentigrangerError):
    def __init__(self, n: int, lag: int, required: int | None = None) -> None:
        if required is None:
            required = 3 * lag + 1
        super().__init__(
            f"{n} observations cannot support lag {lag}; need at least {required}",
            n=n, lag=lag, required=required)
        self.n = n
        self.lag = lag
        self.required = required


class InvalidRatioError(SentigrangerError, ValueError):
    pass


class EmptyTrainError(SentigrangerError):
    pass


# regression / stats
class RankDeficientError(SentigrangerError):
    def __init__(self, rank: int, n_cols: int) -> None:
        super().__init__(f"design has rank {rank} < {n_cols} columns", rank=rank, n_cols=n_cols)
        self.rank = rank


class NonConvergenceError(SentigrangerError):
    pass


class DegenerateResidualsError(SentigrangerError):
    pass


class ConstantSeriesError(SentigrangerError):
    pass


# sentiment
class EmptyCorpusError(SentigrangerError):
    pass


class SingleClassCorpusError(SentigrangerError):
    pass


class EmptyInputError(SentigrangerError):
    pass


# pipeline
class EmptyTestSegmentError(SentigrangerError):
    pass
