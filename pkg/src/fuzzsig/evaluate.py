"""Portfolio-level evaluation, rolling no-lookahead backtests, and report emission."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from datetime import date
from decimal import ROUND_HALF_UP, Decimal

from .config import ResolvedConfig
from .indicators import InsufficientHistoryError
from .inference import (
    PipelineError,
    RuleBase,
    Signal,
    build_rule_base,
    recommend,
    recommend_periods,
)
from .market_data import PriceSeries, aggregate_periods

REPORT_CSV_HEADER = ("symbol", "fuzzy_output", "signal")


@dataclass(frozen=True)
class ReportRow:
    symbol: str
    crisp: float | None
    signal: Signal | None
    note: str | None = None


@dataclass(frozen=True)
class PortfolioReport:
    rows: tuple[ReportRow, ...]
    generated_at: date
    config_fingerprint: str


@dataclass(frozen=True)
class BacktestRecord:
    period_index: int
    date: date
    signal: Signal
    next_return: float


@dataclass(frozen=True)
class BacktestStats:
    symbol: str
    records: tuple[BacktestRecord, ...]
    buy_hit_rate: float | None
    sell_hit_rate: float | None


def format_1dp(crisp: float) -> str:
    """Half-up rounding of the crisp output to one decimal place."""
    return str(Decimal(repr(crisp)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def _rule_base_for(cfg: ResolvedConfig) -> RuleBase:
    return build_rule_base(cfg.primary_weight, cfg.secondary_weight, cfg.buy_at, cfg.sell_at)


def run_portfolio(
    series_list: list[PriceSeries],
    config: ResolvedConfig | None = None,
    generated_at: date | None = None,
    rule_base: RuleBase | None = None,
) -> PortfolioReport:
    """One recommendation row per input symbol, in input order.

    Per-symbol pipeline failures become row notes instead of aborting the
    batch. The default generation timestamp is the latest bar date across the
    inputs, keeping identical inputs byte-identical on re-runs.
    """
    if not series_list:
        raise ValueError("empty input: no series to evaluate")
    cfg = config if config is not None else ResolvedConfig()
    if rule_base is None:
        rule_base = _rule_base_for(cfg)
    rows: list[ReportRow] = []
    for series in series_list:
        try:
            rec = recommend(series, cfg, rule_base)
            rows.append(ReportRow(series.symbol, rec.crisp, rec.signal))
        except PipelineError as exc:
            rows.append(ReportRow(series.symbol, None, None, note=str(exc)))
    if generated_at is None:
        generated_at = max(s.bars[-1].date for s in series_list if s.bars)
    return PortfolioReport(tuple(rows), generated_at, cfg.fingerprint())


def backtest(series: PriceSeries, config: ResolvedConfig | None = None) -> BacktestStats:
    """Rolling evaluation: the signal at period t sees bars up to t only.

    Each signal is paired with the simple close-to-close return into t+1.
    The hit rates count Buy signals preceding positive returns and Sell
    signals preceding negative ones (None when a side never fired).
    """
    cfg = config if config is not None else ResolvedConfig()
    periods = aggregate_periods(series, cfg.days_per_period)
    rule_base = _rule_base_for(cfg)
    records: list[BacktestRecord] = []
    for t in range(len(periods.bars) - 1):
        prefix = PriceSeries(periods.symbol, periods.bars[:t + 1])
        try:
            rec = recommend_periods(prefix, cfg, rule_base)
        except PipelineError:
            continue
        here, ahead = periods.bars[t], periods.bars[t + 1]
        records.append(BacktestRecord(
            period_index=t,
            date=here.date,
            signal=rec.signal,
            next_return=(ahead.close - here.close) / here.close,
        ))
    if len(records) < 2:
        raise InsufficientHistoryError(
            f"{series.symbol}: backtest needs signals at >= 2 periods, got {len(records)}"
        )
    buys = [r for r in records if r.signal is Signal.BUY]
    sells = [r for r in records if r.signal is Signal.SELL]
    buy_rate = sum(r.next_return > 0 for r in buys) / len(buys) if buys else None
    sell_rate = sum(r.next_return < 0 for r in sells) / len(sells) if sells else None
    return BacktestStats(series.symbol, tuple(records), buy_rate, sell_rate)


def emit_report(report: PortfolioReport, format: str = "csv") -> bytes:
    """Serialize a report.

    csv mirrors the one-decimal output table; json keeps full precision plus
    the as-of date and config fingerprint; plotdata emits tab-separated
    (symbol, crisp) pairs for external charting. Failed rows carry their note
    in csv/json and are skipped in plotdata.
    """
    if format == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(REPORT_CSV_HEADER)
        for row in report.rows:
            if row.crisp is None:
                writer.writerow([row.symbol, "", f"error: {row.note}"])
            else:
                writer.writerow([row.symbol, format_1dp(row.crisp), row.signal.value])
        return out.getvalue().encode("utf-8")
    if format == "json":
        payload = {
            "as_of": report.generated_at.isoformat(),
            "config_fingerprint": report.config_fingerprint,
            "rows": [
                {
                    "symbol": row.symbol,
                    "fuzzy_output": row.crisp,
                    "fuzzy_output_1dp": None if row.crisp is None else format_1dp(row.crisp),
                    "signal": None if row.signal is None else row.signal.value,
                    "note": row.note,
                }
                for row in report.rows
            ],
        }
        return (json.dumps(payload, indent=2) + "\n").encode("utf-8")
    if format == "plotdata":
        lines = [f"{row.symbol}\t{row.crisp!r}" for row in report.rows if row.crisp is not None]
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")


def parse_report(data: bytes | str) -> PortfolioReport:
    """Inverse of the json emission; round-trips a report losslessly."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    payload = json.loads(data)
    signals = {s.value: s for s in Signal}
    rows = tuple(
        ReportRow(
            symbol=entry["symbol"],
            crisp=entry["fuzzy_output"],
            signal=None if entry["signal"] is None else signals[entry["signal"]],
            note=entry["note"],
        )
        for entry in payload["rows"]
    )
    return PortfolioReport(
        rows=rows,
        generated_at=date.fromisoformat(payload["as_of"]),
        config_fingerprint=payload["config_fingerprint"],
    )
