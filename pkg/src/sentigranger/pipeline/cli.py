"""``sentigranger`` command line: ingest, score, train-sentiment, causality, synth, report.

Exit status is 0 on success. Failures print one JSON object to stderr
(``{"error": <class>, "message": ..., ...}``) and exit 2 for input/analysis
errors, 1 for unreadable files.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from .. import sentiment as senti
from ..errors import SentigrangerError
from ..stats import DEFAULT_ALPHA, Criterion
from ..timeseries import DEFAULT_DATE_FORMAT, SeriesKind, parse_csv, write_csv
from .report import OutputFormat, parse_json_report, render_report
from .run import RunConfig, Segment, run_pipeline
from .synthetic import gen_synthetic, write_pair

log = logging.getLogger("sentigranger")


def _write_out(data: bytes, path: Path | None) -> None:
    if path is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        path.write_bytes(data)


def cmd_ingest(args: argparse.Namespace) -> None:
    kind = SeriesKind.CLOSE_PRICE if args.kind == "price" else SeriesKind.SENTIMENT_SCORE
    with open(args.input, "rb") as fh:
        series = parse_csv(fh, kind, args.date_column, args.value_column, args.date_format)
    out = open(args.output, "w", encoding="utf-8", newline="") if args.output else sys.stdout
    try:
        write_csv(series, out, args.date_column, args.value_column, args.date_format)
    finally:
        if args.output:
            out.close()
    log.info("%d observations, %s to %s", len(series), series.dates[0], series.dates[-1])


def _model(path: Path | None, seed: int) -> senti.SentimentModel:
    if path is None:
        return senti.train(senti.load_demo_corpus(), seed=seed)
    with open(path, encoding="utf-8") as fh:
        return senti.load_model(fh)


def cmd_train(args: argparse.Namespace) -> None:
    if args.corpus is None:
        corpus = senti.load_demo_corpus()
    else:
        with open(args.corpus, encoding="utf-8-sig", newline="") as fh:
            corpus = senti.read_headlines(fh, labelled=True, date_format=args.date_format)
    model = senti.train(corpus, ratio=args.ratio, epochs=args.epochs,
                        learning_rate=args.learning_rate, seed=args.seed,
                        batch_size=args.batch_size)
    with open(args.output, "w", encoding="utf-8") as fh:
        senti.save_model(model, fh)
    meta = model.meta
    log.info("trained on %d headlines; train accuracy %.3f, held-out accuracy %s",
             meta.n_train, meta.train_accuracy,
             "n/a" if meta.test_accuracy is None else f"{meta.test_accuracy:.3f}")


def cmd_score(args: argparse.Namespace) -> None:
    model = _model(args.model, args.seed)
    with open(args.headlines, encoding="utf-8-sig", newline="") as fh:
        headlines = senti.read_headlines(fh, date_format=args.date_format)
    scores = senti.score_many(model, [h.text for h in headlines])
    series = senti.daily_aggregate(zip((h.date for h in headlines), scores))
    out = open(args.output, "w", encoding="utf-8", newline="") if args.output else sys.stdout
    try:
        senti.write_scores(series, out)
    finally:
        if args.output:
            out.close()


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        price_csv=args.price,
        sentiment_csv=args.sentiment,
        headlines_csv=args.headlines,
        model_path=args.model,
        max_lag=args.max_lag,
        alpha=args.alpha,
        split_ratio=args.split_ratio,
        test_segment=Segment(args.test_segment),
        difference_order=args.difference_order,
        criterion=Criterion(args.criterion),
        rng_seed=args.seed,
        output_format=OutputFormat(args.format),
        date_format=args.date_format,
        price_column=args.price_column,
        score_column=args.score_column,
        workers=args.workers,
    )


def cmd_causality(args: argparse.Namespace) -> None:
    config = config_from_args(args)
    report = run_pipeline(config)
    _write_out(render_report(report, config.output_format), args.output)


def cmd_synth(args: argparse.Namespace) -> None:
    pair = gen_synthetic(args.n, args.coupling, args.noise_sd, args.seed,
                         coupling_lag=args.coupling_lag)
    price, sentiment = write_pair(pair, args.out_dir)
    log.info("wrote %s and %s", price, sentiment)


def cmd_report(args: argparse.Namespace) -> None:
    report = parse_json_report(args.input.read_bytes())
    _write_out(render_report(report, OutputFormat(args.format)), args.output)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sentigranger", description="Headline sentiment scoring and Granger causality tests against close prices.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate and normalise a dated CSV series")
    p.add_argument("input", type=Path)
    p.add_argument("--kind", choices=["price", "sentiment"], default="price")
    p.add_argument("--date-column", default="date")
    p.add_argument("--value-column", default="close")
    p.add_argument("--date-format", default=DEFAULT_DATE_FORMAT)
    p.add_argument("-o", "--output", type=Path)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train-sentiment", help="train the headline scorer")
    p.add_argument("--corpus", type=Path, help="CSV date,text,label (default: bundled demo corpus)")
    p.add_argument("--ratio", type=float, default=senti.DEFAULT_TRAIN_RATIO)
    p.add_argument("--epochs", type=int, default=senti.DEFAULT_EPOCHS)
    p.add_argument("--learning-rate", type=float, default=senti.DEFAULT_LEARNING_RATE)
    p.add_argument("--batch-size", type=int, default=senti.DEFAULT_BATCH_SIZE)
    p.add_argument("--seed", type=int, default=senti.DEFAULT_SEED)
    p.add_argument("--date-format", default=DEFAULT_DATE_FORMAT)
    p.add_argument("-o", "--output", type=Path, required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("score", help="score headlines and aggregate to daily sentiment")
    p.add_argument("headlines", type=Path, help="CSV date,text")
    p.add_argument("--model", type=Path, help="model file (default: train on the demo corpus)")
    p.add_argument("--seed", type=int, default=senti.DEFAULT_SEED)
    p.add_argument("--date-format", default=DEFAULT_DATE_FORMAT)
    p.add_argument("-o", "--output", type=Path)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("causality", help="run the full Granger causality analysis")
    p.add_argument("--price", type=Path, required=True, help="CSV date,close")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--sentiment", type=Path, help="CSV date,score")
    src.add_argument("--headlines", type=Path, help="CSV date,text")
    p.add_argument("--model", type=Path)
    p.add_argument("--max-lag", type=int, default=4)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--split-ratio", type=float, default=0.8)
    p.add_argument("--test-segment", choices=[s.value for s in Segment], default="train")
    p.add_argument("--difference-order", type=int, default=0)
    p.add_argument("--criterion", choices=[c.value for c in Criterion], default="aic")
    p.add_argument("--seed", type=int, default=senti.DEFAULT_SEED)
    p.add_argument("--format", choices=[f.value for f in OutputFormat], default="markdown")
    p.add_argument("--date-format", default=DEFAULT_DATE_FORMAT)
    p.add_argument("--price-column", default="close")
    p.add_argument("--score-column", default="score")
    p.add_argument("--workers", type=int)
    p.add_argument("-o", "--output", type=Path)
    p.set_defaults(func=cmd_causality)

    p = sub.add_parser("synth", help="write a seeded synthetic price/sentiment pair")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--coupling", type=float, default=0.8)
    p.add_argument("--noise-sd", type=float, default=0.1)
    p.add_argument("--coupling-lag", type=int, default=1)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out-dir", type=Path, required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="re-render a JSON report")
    p.add_argument("input", type=Path)
    p.add_argument("--format", choices=[f.value for f in OutputFormat], default="markdown")
    p.add_argument("-o", "--output", type=Path)
    p.set_defaults(func=cmd_report)
    return parser


def _fail(payload: dict, code: int) -> int:
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except SentigrangerError as exc:
        return _fail(exc.to_dict(), 2)
    except (ValueError, json.JSONDecodeError) as exc:
        return _fail({"error": type(exc).__name__, "message": str(exc)}, 2)
    except OSError as exc:
        return _fail({"error": type(exc).__name__, "message": str(exc),
                      "file": getattr(exc, "filename", None)}, 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
