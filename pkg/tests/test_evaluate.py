from datetime import date

import pytest

from fuzzsig.config import ResolvedConfig
from fuzzsig.evaluate import (
    PortfolioReport,
    ReportRow,
    backtest,
    emit_report,
    format_1dp,
    parse_report,
    run_portfolio,
)
from fuzzsig.fixtures import portfolio_fixture, random_walk_series, uptrend_series
from fuzzsig.indicators import InsufficientHistoryError
from fuzzsig.inference import Signal, classify_signal, recommend
from fuzzsig.market_data import PriceSeries, parse_csv

from conftest import DATA_DIR


class TestRunPortfolio:
    def test_ten_symbols_give_ten_consistent_rows(self):
        basket = portfolio_fixture(seed=404, symbols=10, periods=52)
        report = run_portfolio(basket)
        assert len(report.rows) == 10
        assert [r.symbol for r in report.rows] == [s.symbol for s in basket]
        for row in report.rows:
            assert row.signal is classify_signal(row.crisp)

    def test_bundled_fixture_reproduces_golden_bytes(self):
        basket = parse_csv((DATA_DIR / "portfolio_fixture.csv").read_bytes())
        report = run_portfolio(basket)
        assert emit_report(report, "csv") == (DATA_DIR / "golden_portfolio.csv").read_bytes()

    def test_short_symbol_is_isolated_as_row_note(self):
        basket = portfolio_fixture(seed=7, symbols=3, periods=52)
        stub = PriceSeries("STUB", basket[0].bars[: 5 * 15])
        report = run_portfolio(basket[:2] + [stub] + basket[2:])
        assert len(report.rows) == 4
        stub_row = report.rows[2]
        assert stub_row.symbol == "STUB"
        assert stub_row.crisp is None and stub_row.signal is None
        assert "indicators" in stub_row.note
        for row in (report.rows[0], report.rows[1], report.rows[3]):
            assert row.crisp is not None

    def test_empty_input_errors(self):
        with pytest.raises(ValueError, match="empty"):
            run_portfolio([])

    def test_row_order_follows_input_order(self):
        basket = portfolio_fixture(seed=21, symbols=4, periods=52)
        fwd = run_portfolio(basket)
        rev = run_portfolio(basket[::-1])
        assert list(fwd.rows) == list(rev.rows[::-1])

    def test_fingerprint_changes_iff_config_changes(self):
        basket = portfolio_fixture(seed=3, symbols=2, periods=52)
        base = run_portfolio(basket)
        same = run_portfolio(basket, ResolvedConfig())
        bumped = run_portfolio(basket, ResolvedConfig(delta=0.1))
        assert base.config_fingerprint == same.config_fingerprint
        assert base.config_fingerprint != bumped.config_fingerprint

    def test_generated_at_defaults_to_last_bar_date(self):
        basket = portfolio_fixture(seed=3, symbols=2, periods=52)
        report = run_portfolio(basket)
        assert report.generated_at == max(s.bars[-1].date for s in basket)


class TestBacktest:
    def test_monotone_rising_series_pairs_positive_returns(self):
        stats = backtest(uptrend_series(periods=45))
        assert len(stats.records) >= 2
        assert all(r.next_return > 0 for r in stats.records)
        assert stats.buy_hit_rate in (None, 1.0)
        if stats.buy_hit_rate is not None:
            assert any(r.signal is Signal.BUY for r in stats.records)

    def test_signals_equal_recommend_on_truncated_prefix(self):
        cfg = ResolvedConfig()
        series = random_walk_series("S", seed=88, periods=45)
        stats = backtest(series, cfg)
        for record in stats.records:
            cutoff = (record.period_index + 1) * cfg.days_per_period
            prefix = PriceSeries(series.symbol, series.bars[:cutoff])
            again = recommend(prefix, cfg)
            assert again.signal is record.signal

    def test_stats_match_two_pass_recomputation(self):
        cfg = ResolvedConfig()
        series = random_walk_series("S", seed=15, periods=50)
        stats = backtest(series, cfg)

        from fuzzsig.market_data import aggregate_periods

        periods = aggregate_periods(series, cfg.days_per_period)
        closes = [b.close for b in periods.bars]
        expected = []
        for t in range(len(periods.bars) - 1):
            prefix = PriceSeries(series.symbol, periods.bars[:t + 1])
            try:
                from fuzzsig.inference import recommend_periods

                sig = recommend_periods(prefix, cfg).signal
            except Exception:
                continue
            expected.append((t, sig, (closes[t + 1] - closes[t]) / closes[t]))
        assert [(r.period_index, r.signal, r.next_return) for r in stats.records] == expected
        buys = [r for _, s, r in expected if s is Signal.BUY]
        sells = [r for _, s, r in expected if s is Signal.SELL]
        want_buy = sum(r > 0 for r in buys) / len(buys) if buys else None
        want_sell = sum(r < 0 for r in sells) / len(sells) if sells else None
        assert stats.buy_hit_rate == want_buy
        assert stats.sell_hit_rate == want_sell

    def test_hit_rates_bounded(self):
        stats = backtest(random_walk_series("S", seed=31, periods=50))
        for rate in (stats.buy_hit_rate, stats.sell_hit_rate):
            assert rate is None or 0.0 <= rate <= 1.0

    def test_insufficient_history_errors(self):
        with pytest.raises(InsufficientHistoryError, match="backtest"):
            backtest(random_walk_series("S", seed=1, periods=36))


def reference_report():
    rows = (
        ReportRow("CHAMS", 0.3, Signal.SELL),
        ReportRow("DANGCEM", 0.7, Signal.BUY),
        ReportRow("FLOURMILL", 0.4, Signal.HOLD),
        ReportRow("ACCESS", 0.7, Signal.BUY),
        ReportRow("FO", 0.3, Signal.SELL),
        ReportRow("GUARANTY", 0.7, Signal.BUY),
        ReportRow("JBERGER", 0.4, Signal.HOLD),
        ReportRow("AGLEVENT", 0.3, Signal.SELL),
        ReportRow("GUINNESS", 0.4, Signal.HOLD),
        ReportRow("NB", 0.7, Signal.BUY),
    )
    return PortfolioReport(rows, date(2020, 3, 23), "deadbeef0123")


class TestEmitReport:
    def test_csv_rows_match_reference_table(self):
        text = emit_report(reference_report(), "csv").decode()
        lines = text.strip().split("\n")
        assert lines[0] == "symbol,fuzzy_output,signal"
        assert "CHAMS,0.3,Sell" in lines
        assert "DANGCEM,0.7,Buy" in lines
        assert "FLOURMILL,0.4,Hold" in lines
        assert "GUARANTY,0.7,Buy" in lines
        assert len(lines) == 11

    def test_json_round_trip(self):
        report = run_portfolio(portfolio_fixture(seed=5, symbols=3, periods=52))
        assert parse_report(emit_report(report, "json")) == report

    def test_plotdata_preserves_row_order(self):
        report = reference_report()
        lines = emit_report(report, "plotdata").decode().strip().split("\n")
        assert [line.split("\t")[0] for line in lines] == [r.symbol for r in report.rows]

    def test_error_rows_survive_csv_and_json(self):
        report = PortfolioReport(
            (ReportRow("OK", 0.5, Signal.HOLD), ReportRow("BAD", None, None, note="boom")),
            date(2020, 1, 1), "abc",
        )
        text = emit_report(report, "csv").decode()
        assert "BAD,,error: boom" in text
        assert parse_report(emit_report(report, "json")) == report

    def test_unknown_format_rejected(self):
        with pytest.raises(ValueError, match="unknown"):
            emit_report(reference_report(), "xml")


class TestRounding:
    @pytest.mark.parametrize("value,expected", [
        (0.25, "0.3"),     # half rounds up
        (0.349999, "0.3"),
        (0.35, "0.4"),
        (0.74999, "0.7"),
        (0.0, "0.0"),
        (1.0, "1.0"),
    ])
    def test_half_up_to_one_decimal(self, value, expected):
        assert format_1dp(value) == expected
