import json
import math
from datetime import date

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sentigranger.errors import DomainError, DuplicateDateError, EmptyTestSegmentError, InsufficientObservationsError
from sentigranger.pipeline import (
    CausalityReport,
    OutputFormat,
    ReportRow,
    RunConfig,
    Segment,
    gen_synthetic,
    narrative_verdict,
    oos_compare,
    parse_json_report,
    render_report,
    run_pipeline,
    write_pair,
)
from sentigranger.pipeline.cli import main
from sentigranger.stats import Direction, Verdict

from conftest import FIXTURES

CAUSAL = FIXTURES / "synth_causal"
TABLE_PART1 = (0.0184, 0.0074, 0.0156, 0.0384)
TABLE_PART2 = (0.1737, 0.1810, 0.3321, 0.3452)


def rows_from_pvalues(part1, part2, alpha=0.05):
    rows = []
    for direction, pvals in ((Direction.X_TO_Y, part1), (Direction.Y_TO_X, part2)):
        for lag, p in enumerate(pvals, start=1):
            verdict = Verdict.REJECT_NULL if p < alpha else Verdict.FAIL_TO_REJECT_NULL
            rows.append(ReportRow(direction, lag, p, verdict))
    return rows


def causal_config(**kw):
    return RunConfig(price_csv=CAUSAL / "price.csv", sentiment_csv=CAUSAL / "sentiment.csv", **kw)


class TestSynthetic:
    def test_golden_first_rows(self):
        pair = gen_synthetic(500, 0.8, 0.1, 42)
        assert pair.dates[:3] == (date(2015, 5, 4), date(2015, 5, 5), date(2015, 5, 6))
        np.testing.assert_array_equal(pair.y[:3], [0.0, 0.3332921620007137, -0.7372892273205187])
        np.testing.assert_array_equal(
            pair.x[:3], [0.30471707975443135, -1.0399841062404955, 0.7504511958064572])

    def test_bitwise_identical_csvs(self, tmp_path):
        a = write_pair(gen_synthetic(300, 0.8, 0.1, 9), tmp_path / "a")
        b = write_pair(gen_synthetic(300, 0.8, 0.1, 9), tmp_path / "b")
        for pa, pb in zip(a, b):
            assert pa.read_bytes() == pb.read_bytes()

    def test_committed_fixture_matches_generator(self, tmp_path):
        paths = write_pair(gen_synthetic(500, 0.8, 0.1, 42), tmp_path)
        for p in paths:
            assert p.read_bytes() == (CAUSAL / p.name).read_bytes()

    def test_weekdays_only(self):
        pair = gen_synthetic(60, 0.0, 1.0, 1)
        assert all(d.weekday() < 5 for d in pair.dates)

    def test_zero_coupling_ignores_x(self):
        a, b = gen_synthetic(100, 0.0, 1.0, 3), gen_synthetic(100, 0.0, 1.0, 3)
        assert np.array_equal(a.y, b.y)
        # y is the AR(1) of the noise alone
        eps = np.random.default_rng(3)
        eps.standard_normal(100)
        e = eps.normal(0.0, 1.0, 100)
        y = np.zeros(100)
        for t in range(1, 100):
            y[t] = 0.5 * y[t - 1] + e[t]
        np.testing.assert_array_equal(a.y, y)

    @pytest.mark.parametrize("args", [(49, 0.8, 0.1, 1), (100, 0.8, 0.0, 1), (100, math.nan, 1.0, 1)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            gen_synthetic(*args)


class TestOos:
    def test_causal_improves(self):
        r, u = oos_compare(gen_synthetic(500, 0.8, 0.1, 42), 1, 0.8)
        assert u < r
        assert (r, u) == pytest.approx((0.7907799353210793, 0.10160435829331521), rel=1e-10)

    def test_independent_close(self):
        close = 0
        for seed in range(100):
            r, u = oos_compare(gen_synthetic(500, 0.0, 0.1, seed), 1, 0.8)
            close += abs(u - r) <= 0.05 * r
        assert close >= 80

    def test_no_test_segment(self):
        with pytest.raises(EmptyTestSegmentError):
            oos_compare(gen_synthetic(100, 0.8, 0.1, 1), 1, 1.0)

    def test_matches_manual_forecast(self):
        pair = gen_synthetic(100, 0.8, 0.1, 5)
        _, u = oos_compare(pair, 1, 0.8)
        X = np.column_stack([np.ones(79), pair.y[:79], pair.x[:79]])
        beta = np.linalg.lstsq(X, pair.y[1:80], rcond=None)[0]
        pred = np.column_stack([np.ones(20), pair.y[79:99], pair.x[79:99]]) @ beta
        assert u == pytest.approx(math.sqrt(np.mean((pair.y[80:] - pred) ** 2)), rel=1e-9)


class TestRunPipeline:
    def test_causal_fixture_names_x_to_y(self):
        report = run_pipeline(causal_config())
        assert report.narrative.startswith("Sentiment score Granger-causes close price")
        assert report.max_lag == 4 and len(report.rows) == 8
        assert report.metadata["n_tested"] == 400

    def test_golden_reports(self):
        report = run_pipeline(causal_config())
        assert render_report(report) == (CAUSAL / "report.md").read_bytes()
        assert render_report(report, OutputFormat.JSON) == (CAUSAL / "report.json").read_bytes()

    def test_repeatable(self):
        a = render_report(run_pipeline(causal_config(workers=3)), OutputFormat.JSON)
        b = render_report(run_pipeline(causal_config()), OutputFormat.JSON)
        assert a == b

    def test_full_segment_ignores_split(self):
        a = run_pipeline(causal_config(split_ratio=1.0, test_segment=Segment.FULL))
        b = run_pipeline(causal_config(split_ratio=0.8, test_segment=Segment.FULL))
        assert [r.p_value for r in a.rows] == [r.p_value for r in b.rows]
        assert a.oos is None and b.oos is not None

    def test_max_lag_monotone(self):
        a = run_pipeline(causal_config(max_lag=3))
        b = run_pipeline(causal_config(max_lag=4))
        assert a.table(Direction.X_TO_Y) == b.table(Direction.X_TO_Y)[:3]
        assert a.table(Direction.Y_TO_X) == b.table(Direction.Y_TO_X)[:3]

    def test_differencing(self):
        report = run_pipeline(causal_config(difference_order=1))
        assert report.metadata["n_aligned"] == 500
        assert report.rows[0].n_used == math.floor(0.8 * 499) - 1

    def test_insufficient(self, tmp_path):
        write_pair(gen_synthetic(50, 0.8, 0.1, 1), tmp_path)
        cfg = RunConfig(price_csv=tmp_path / "price.csv", sentiment_csv=tmp_path / "sentiment.csv",
                        max_lag=15)
        with pytest.raises(InsufficientObservationsError) as info:
            run_pipeline(cfg)
        assert info.value.required == 46

    def test_small_sample_warning(self, tmp_path):
        write_pair(gen_synthetic(55, 0.8, 0.1, 1), tmp_path)
        report = run_pipeline(RunConfig(price_csv=tmp_path / "price.csv",
                                        sentiment_csv=tmp_path / "sentiment.csv"))
        assert any("only 44 observations" in w for w in report.metadata["warnings"])

    def test_headlines_input(self, tmp_path):
        (tmp_path / "price.csv").write_text(
            "date,close\n" + "".join(f"2015-06-{d:02d},{100 + (d * 7) % 11}\n" for d in range(1, 31)))
        texts = ["Sensex surges on strong earnings", "Markets crash on weak demand", "Rupee falls"]
        (tmp_path / "news.csv").write_text("date,text\n" + "".join(
            f"2015-06-{d:02d},{texts[(d * d) % 3]}\n2015-06-{d:02d},{texts[d % 3]}\n"
            for d in range(1, 31)))
        report = run_pipeline(RunConfig(price_csv=tmp_path / "price.csv",
                                        headlines_csv=tmp_path / "news.csv", max_lag=2))
        assert report.metadata["sentiment_source"] == "headlines"
        assert report.metadata["n_sentiment"] == 30
        assert len(report.rows) == 4

    def test_file_context_in_errors(self, tmp_path):
        (tmp_path / "price.csv").write_text("date,close\n2015-06-01,1\n2015-06-01,2\n")
        (tmp_path / "s.csv").write_text("date,score\n2015-06-01,0.5\n")
        with pytest.raises(DuplicateDateError) as info:
            run_pipeline(RunConfig(price_csv=tmp_path / "price.csv", sentiment_csv=tmp_path / "s.csv"))
        assert info.value.details["file"].endswith("price.csv")

    @pytest.mark.parametrize("kw", [dict(max_lag=0), dict(alpha=1.0), dict(split_ratio=0.0)])
    def test_config_validation(self, kw):
        with pytest.raises(ValueError):
            causal_config(**kw)

    def test_config_needs_one_source(self):
        with pytest.raises(ValueError):
            RunConfig(price_csv=CAUSAL / "price.csv")


class TestReport:
    def two_part_report(self, **kw):
        rows = rows_from_pvalues(TABLE_PART1, TABLE_PART2)
        return CausalityReport(alpha=0.05, rows=rows, narrative=narrative_verdict(rows, 0.05), **kw)

    def test_two_part_layout(self):
        md = render_report(self.two_part_report()).decode()
        part1, part2 = md.split("## Part 1")[1].split("## Part 2")
        for lag, p in enumerate(TABLE_PART1, start=1):
            assert f"| Lag {lag} | n/a | n/a | {p:.4f} | reject null |" in part1
        for lag, p in enumerate(TABLE_PART2, start=1):
            assert f"| Lag {lag} | n/a | n/a | {p:.4f} | fail to reject null |" in part2
        assert "ADF diagnostics not computed." in md
        assert "Sentiment score Granger-causes close price" in md.split("## Conclusion")[1]

    def test_json_round_trip(self):
        report = run_pipeline(causal_config())
        assert parse_json_report(render_report(report, OutputFormat.JSON)) == report
        empty = self.two_part_report()
        assert parse_json_report(render_report(empty, OutputFormat.JSON)) == empty

    def test_json_schema_version(self):
        payload = json.loads(render_report(self.two_part_report(), OutputFormat.JSON))
        assert payload["schema_version"] == 1
        payload["schema_version"] = 2
        with pytest.raises(ValueError):
            parse_json_report(json.dumps(payload))

    def test_failed_cell_renders(self):
        rows = rows_from_pvalues((0.01,), (0.5,))
        rows[1] = ReportRow(Direction.Y_TO_X, 1, None, None, error="RankDeficientError: rank 2 < 3")
        md = render_report(CausalityReport(0.05, rows, narrative_verdict(rows, 0.05))).decode()
        assert "error: RankDeficientError" in md

    def test_mismatched_tables_rejected(self):
        with pytest.raises(ValueError):
            CausalityReport(0.05, rows_from_pvalues((0.1, 0.2), (0.3,)), "")


pvals = st.lists(st.floats(0, 1), min_size=1, max_size=6)


@given(pvals, pvals, st.floats(0.001, 0.5))
def test_narrative_is_function_of_tables(p1, p2, alpha):
    n = min(len(p1), len(p2))
    rows = rows_from_pvalues(p1[:n], p2[:n], alpha)
    text = narrative_verdict(rows, alpha)
    fwd = [p < alpha for p in p1[:n]]
    rev = [p < alpha for p in p2[:n]]
    if all(fwd) and not any(rev):
        assert text.startswith("Sentiment score Granger-causes")
    elif all(rev) and not any(fwd):
        assert text.startswith("Close price Granger-causes")
    else:
        assert text.startswith("Inconclusive/bidirectional")
    assert narrative_verdict(list(reversed(rows)), alpha) == text


class TestCli:
    def test_synth_then_causality(self, tmp_path, capsysbinary):
        assert main(["synth", "--out-dir", str(tmp_path)]) == 0
        assert (tmp_path / "price.csv").read_bytes() == (CAUSAL / "price.csv").read_bytes()
        assert main(["causality", "--price", str(tmp_path / "price.csv"),
                     "--sentiment", str(tmp_path / "sentiment.csv")]) == 0
        assert capsysbinary.readouterr().out == (CAUSAL / "report.md").read_bytes()

    def test_json_then_report(self, tmp_path, capsysbinary):
        out = tmp_path / "r.json"
        assert main(["causality", "--price", str(CAUSAL / "price.csv"), "--sentiment",
                     str(CAUSAL / "sentiment.csv"), "--format", "json", "-o", str(out)]) == 0
        assert main(["report", str(out)]) == 0
        assert capsysbinary.readouterr().out == (CAUSAL / "report.md").read_bytes()

    def test_error_is_machine_readable(self, tmp_path, capsys):
        code = main(["causality", "--price", str(CAUSAL / "price.csv"), "--sentiment",
                     str(CAUSAL / "sentiment.csv"), "--max-lag", "200"])
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "InsufficientObservationsError" and err["required"] == 601

    def test_missing_file(self, tmp_path, capsys):
        assert main(["ingest", str(tmp_path / "nope.csv")]) == 1
        assert json.loads(capsys.readouterr().err)["error"] == "FileNotFoundError"

    def test_ingest_sorts(self, tmp_path):
        src = tmp_path / "p.csv"
        src.write_text("date,close\n2015-05-05,2.5\n2015-05-04,1.0\n")
        assert main(["ingest", str(src), "-o", str(tmp_path / "o.csv")]) == 0
        assert (tmp_path / "o.csv").read_text() == "date,close\n2015-05-04,1.0\n2015-05-05,2.5\n"

    def test_train_and_score(self, tmp_path):
        model = tmp_path / "m.json"
        assert main(["train-sentiment", "-o", str(model)]) == 0
        assert model.read_bytes() == (FIXTURES / "demo_model.json").read_bytes()
        news = tmp_path / "news.csv"
        news.write_text("date,text\n2015-05-05,Sensex surges\n2015-05-04,Rupee falls\n"
                        "2015-05-04,Markets rally\n")
        assert main(["score", str(news), "--model", str(model), "-o", str(tmp_path / "s.csv")]) == 0
        lines = (tmp_path / "s.csv").read_text().splitlines()
        assert lines[0] == "date,score" and len(lines) == 3
        assert all(0 <= float(l.split(",")[1]) <= 1 for l in lines[1:])
