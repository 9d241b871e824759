"""Hashed bag-of-words logistic sentiment scorer and daily aggregation.

A headline is lowercased and split into tokens, each token is hashed into one
of ``FEATURE_DIM`` buckets, the count vector is L2-normalised, and a logistic
model maps it to the probability that the headline is positive.

Hash: keyed BLAKE2b with an 8-byte digest over the token's UTF-8 bytes, key
``HASH_SEED`` as 8 little-endian bytes; the digest read as a little-endian
unsigned integer, modulo ``FEATURE_DIM``. This is identical on every platform.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import unicodedata
from collections import defaultdict
from dataclasses import dataclass
from datetime import date, datetime
from enum import Enum
from importlib import resources
from typing import Iterable, Sequence, TextIO

import numpy as np
from scipy import sparse

from .errors import (
    EmptyCorpusError,
    EmptyInputError,
    MissingColumnError,
    SingleClassCorpusError,
    UnparsableDateError,
    UnparsableValueError,
)
from .timeseries import DEFAULT_DATE_FORMAT, DatedSeries, SeriesKind

FEATURE_DIM = 2 ** 16
HASH_SEED = 0x5EED_2015_0501_0001
MODEL_FORMAT = "sentigranger-hashed-logreg"
MODEL_VERSION = 1

DEFAULT_EPOCHS = 100
DEFAULT_LEARNING_RATE = 2.0
DEFAULT_BATCH_SIZE = 16
DEFAULT_TRAIN_RATIO = 0.8
DEFAULT_SEED = 20150504

_HASH_KEY = HASH_SEED.to_bytes(8, "little")


class Label(str, Enum):
    POSITIVE = "pos"
    NEGATIVE = "neg"


@dataclass(frozen=True)
class Headline:
    date: date
    text: str
    label: Label | None = None

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("headline text is empty")


@dataclass(frozen=True)
class TrainingMeta:
    epochs: int
    learning_rate: float
    batch_size: int
    seed: int
    n_train: int
    n_test: int
    train_accuracy: float
    test_accuracy: float | None


@dataclass(frozen=True, eq=False)
class SentimentModel:
    weights: np.ndarray
    bias: float
    meta: TrainingMeta | None = None
    feature_dim: int = FEATURE_DIM
    hash_seed: int = HASH_SEED

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=np.float64)
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        if self.feature_dim != FEATURE_DIM or self.hash_seed != HASH_SEED:
            raise ValueError("model was built with a different feature hashing setup")
        if w.shape != (FEATURE_DIM,) or not np.all(np.isfinite(w)) or not math.isfinite(self.bias):
            raise ValueError("weights must be a finite vector of length FEATURE_DIM")

    @classmethod
    def zero(cls) -> SentimentModel:
        return cls(np.zeros(FEATURE_DIM), 0.0)


def _strip_punct(token: str) -> str:
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, trim edge punctuation, drop empties.

    Interior punctuation survives: ``"RBI's rate-cut,"`` gives ``["rbi's", "rate-cut"]``.
    """
    tokens = (_strip_punct(t) for t in text.lower().split())
    return [t for t in tokens if t]


def feature_index(token: str) -> int:
    digest = hashlib.blake2b(token.encode("utf-8", "surrogatepass"), digest_size=8,
                             key=_HASH_KEY).digest()
    return int.from_bytes(digest, "little") % FEATURE_DIM


def vectorize(tokens: Sequence[str]) -> dict[int, float]:
    """Sparse L2-normalised hashed counts as ``{index: value}``; empty for no tokens."""
    counts: dict[int, float] = defaultdict(float)
    for tok in tokens:
        counts[feature_index(tok)] += 1.0
    norm = math.sqrt(sum(v * v for v in counts.values()))
    return {i: v / norm for i, v in sorted(counts.items())} if counts else {}


def _design(texts: Sequence[str]) -> sparse.csr_matrix:
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for text in texts:
        vec = vectorize(tokenize(text))
        indices.extend(vec.keys())
        data.extend(vec.values())
        indptr.append(len(indices))
    return sparse.csr_matrix((data, indices, indptr), shape=(len(texts), FEATURE_DIM))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # split by sign so neither branch overflows
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def score(model: SentimentModel, text: str) -> float:
    """Probability that ``text`` is positive: 0 confidently negative, 0.5 undecided."""
    return float(score_many(model, [text])[0])


def score_many(model: SentimentModel, texts: Sequence[str]) -> np.ndarray:
    if not texts:
        return np.empty(0)
    return _sigmoid(_design(texts) @ model.weights + model.bias)


def train(
    corpus: Sequence[Headline],
    ratio: float = DEFAULT_TRAIN_RATIO,
    epochs: int = DEFAULT_EPOCHS,
    learning_rate: float = DEFAULT_LEARNING_RATE,
    seed: int = DEFAULT_SEED,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> SentimentModel:
    """Fit the logistic scorer by mini-batch gradient descent on log-loss.

    The corpus is shuffled once with ``numpy.random.default_rng(seed)`` and the
    first ``floor(ratio * n)`` headlines train; the rest give the held-out
    accuracy in ``model.meta``. Each epoch reshuffles the training rows with
    the same generator. Weights and bias start at zero, so zero epochs give a
    model that scores 0.5 everywhere.
    """
    if not corpus:
        raise EmptyCorpusError("training corpus is empty")
    if any(h.label is None for h in corpus):
        raise ValueError("every training headline needs a label")
    if len({h.label for h in corpus}) < 2:
        raise SingleClassCorpusError("training corpus holds a single label")
    if not 0 < ratio < 1:
        raise ValueError(f"train ratio must lie in (0, 1), got {ratio}")
    if epochs < 0 or batch_size < 1:
        raise ValueError("epochs must be >= 0 and batch_size >= 1")

    rng = np.random.default_rng(seed)
    order = rng.permutation(len(corpus))
    n_train = max(1, math.floor(ratio * len(corpus)))
    train_idx, test_idx = order[:n_train], order[n_train:]

    X = _design([h.text for h in corpus])
    labels = np.array([1.0 if h.label is Label.POSITIVE else 0.0 for h in corpus])
    X_train, y_train = X[train_idx], labels[train_idx]

    w = np.zeros(FEATURE_DIM)
    b = 0.0
    for _ in range(epochs):
        perm = rng.permutation(n_train)
        for start in range(0, n_train, batch_size):
            rows = perm[start:start + batch_size]
            Xb = X_train[rows]
            resid = _sigmoid(Xb @ w + b) - y_train[rows]
            w -= learning_rate * (Xb.T @ resid) / rows.shape[0]
            b -= learning_rate * float(resid.mean())

    def accuracy(idx: np.ndarray) -> float | None:
        if idx.size == 0:
            return None
        pred = _sigmoid(X[idx] @ w + b) >= 0.5
        return float(np.mean(pred == (labels[idx] == 1.0)))

    meta = TrainingMeta(epochs, learning_rate, batch_size, seed, int(n_train),
                        int(test_idx.size), accuracy(train_idx), accuracy(test_idx))
    return SentimentModel(w, b, meta)


def daily_aggregate(scored: Iterable[tuple[date, float]]) -> DatedSeries:
    """Per-day arithmetic mean of headline scores, sorted by date.

    Scores of one day are summed in sorted order, so the result does not
    depend on input order down to the last bit.
    """
    by_day: dict[date, list[float]] = defaultdict(list)
    for day, s in scored:
        by_day[day].append(float(s))
    if not by_day:
        raise EmptyInputError("no scored headlines to aggregate")
    days = sorted(by_day)
    means = [math.fsum(sorted(by_day[d])) / len(by_day[d]) for d in days]
    return DatedSeries(SeriesKind.SENTIMENT_SCORE, tuple(days), np.array(means))


# ---- file formats -------------------------------------------------------------

def read_headlines(source: TextIO | str, labelled: bool = False,
                   date_format: str = DEFAULT_DATE_FORMAT) -> list[Headline]:
    """Read ``date,text`` (or ``date,text,label`` when ``labelled``) CSV rows."""
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.DictReader(source)
    fields = reader.fieldnames or []
    for col in ("date", "text") + (("label",) if labelled else ()):
        if col not in fields:
            raise MissingColumnError(col, list(fields))
    out = []
    for i, rec in enumerate(reader, start=1):
        raw = (rec["date"] or "").strip()
        try:
            day = datetime.strptime(raw, date_format).date()
        except ValueError:
            raise UnparsableDateError(i, raw, date_format) from None
        text = rec["text"] or ""
        if not text.strip():
            continue
        label = None
        if labelled:
            raw_label = (rec["label"] or "").strip().lower()
            try:
                label = Label(raw_label)
            except ValueError:
                raise UnparsableValueError(i, raw_label) from None
        out.append(Headline(day, text, label))
    return out


def load_demo_corpus() -> list[Headline]:
    """Small labelled corpus of synthetic financial headlines shipped with the package."""
    text = resources.files("sentigranger").joinpath("data/demo_headlines.csv").read_text("utf-8")
    return read_headlines(text, labelled=True)


def write_scores(series: DatedSeries, sink: TextIO) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["date", "score"])
    for d, v in zip(series.dates, series.values):
        writer.writerow([d.isoformat(), repr(float(v))])


def model_to_dict(model: SentimentModel) -> dict:
    """Plain-text model dump; only nonzero weights are listed, keyed by bucket index."""
    nz = np.flatnonzero(model.weights)
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "feature_dim": model.feature_dim,
        "hash_seed": model.hash_seed,
        "hash": "blake2b-64-keyed-le",
        "bias": model.bias,
        "weights": {str(int(i)): float(model.weights[i]) for i in nz},
        "training_meta": None if model.meta is None else model.meta.__dict__,
    }


def model_from_dict(payload: dict) -> SentimentModel:
    if payload.get("format") != MODEL_FORMAT or payload.get("version") != MODEL_VERSION:
        raise ValueError("unrecognised model file format or version")
    w = np.zeros(int(payload["feature_dim"]))
    for k, v in payload["weights"].items():
        w[int(k)] = float(v)
    meta = payload.get("training_meta")
    return SentimentModel(w, float(payload["bias"]),
                          TrainingMeta(**meta) if meta else None,
                          int(payload["feature_dim"]), int(payload["hash_seed"]))


def save_model(model: SentimentModel, sink: TextIO) -> None:
    json.dump(model_to_dict(model), sink, indent=1, sort_keys=True)
    sink.write("\n")


def load_model(source: TextIO) -> SentimentModel:
    return model_from_dict(json.load(source))
