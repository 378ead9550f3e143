"""Command-line front door: indicator dumps, signals, portfolio runs, backtests."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from .config import ConfigError, ResolvedConfig, load_config_file
from .evaluate import backtest, emit_report, run_portfolio
from .fixtures import DEFAULT_SEED, portfolio_fixture
from .indicators import macd, rsi, stochastic, williams
from .inference import PipelineError, recommend, rules_from_csv, rules_to_csv, build_rule_base
from .market_data import MarketDataError, PriceSeries, aggregate_periods, parse_csv, serialize_csv
from .tuning import FibLevels, ScaledSecondary, SecondaryKind, classify_level

CONFIG_ENV_VAR = "FUZZSIG_CONFIG"


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE",
                        help=f"config file (default: ${CONFIG_ENV_VAR} if set)")
    parser.add_argument("--delta", type=float, metavar="D",
                        help="override fuzzy.delta (0 disables the type-2 footprint)")
    parser.add_argument("--period-days", type=int, metavar="N",
                        help="override data.days_per_period")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fuzzsig",
        description="Fuzzy-inference buy/hold/sell signals from OHLCV CSV data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("indicators", help="per-period indicator table")
    p.add_argument("csv", help="input OHLCV CSV file")
    p.add_argument("--symbol", help="restrict to one symbol")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    _add_common(p)

    p = sub.add_parser("signal", help="one recommendation for one symbol")
    p.add_argument("csv", help="input OHLCV CSV file")
    p.add_argument("--symbol", required=True)
    p.add_argument("--rules", metavar="FILE", help="user-supplied rule table CSV")
    p.add_argument("--format", choices=("text", "json"), default="text")
    _add_common(p)

    p = sub.add_parser("portfolio", help="recommendation report for every symbol")
    p.add_argument("csv", help="input OHLCV CSV file")
    p.add_argument("--rules", metavar="FILE", help="user-supplied rule table CSV")
    p.add_argument("--format", choices=("csv", "json", "plotdata"), default="csv")
    _add_common(p)

    p = sub.add_parser("backtest", help="rolling no-lookahead evaluation of one symbol")
    p.add_argument("csv", help="input OHLCV CSV file")
    p.add_argument("--symbol", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    _add_common(p)

    p = sub.add_parser("rules", help="rule-base inspection")
    p.add_argument("action", choices=("dump",))
    _add_common(p)

    p = sub.add_parser("fixtures", help="synthetic fixture generation")
    p.add_argument("action", choices=("generate",))
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--symbols", type=int, default=10)
    p.add_argument("--periods", type=int, default=52)
    p.add_argument("--out", metavar="FILE", help="write here instead of stdout")
    _add_common(p)

    return parser


def _resolve_config(args: argparse.Namespace) -> ResolvedConfig:
    cfg = ResolvedConfig()
    path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV_VAR)
    if path:
        cfg = load_config_file(path, cfg)
    if getattr(args, "delta", None) is not None:
        cfg.delta = args.delta
    if getattr(args, "period_days", None) is not None:
        cfg.days_per_period = args.period_days
    cfg.validate()
    return cfg


def _load_series(path: str) -> list[PriceSeries]:
    try:
        with open(path, "rb") as fh:
            return parse_csv(fh)
    except OSError as exc:
        raise MarketDataError(f"cannot read {path!r}: {exc}") from None


def _pick_symbol(series_list: list[PriceSeries], symbol: str) -> PriceSeries:
    for series in series_list:
        if series.symbol == symbol:
            return series
    known = ", ".join(s.symbol for s in series_list) or "none"
    raise MarketDataError(f"symbol {symbol!r} not in input (have: {known})")


def _load_rules(args: argparse.Namespace):
    path = getattr(args, "rules", None)
    if not path:
        return None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return rules_from_csv(fh.read())
    except OSError as exc:
        raise MarketDataError(f"cannot read {path!r}: {exc}") from None


def _indicator_rows(series: PriceSeries, cfg: ResolvedConfig) -> list[dict]:
    periods = aggregate_periods(series, cfg.days_per_period)
    bars = periods.bars
    highs = np.array([b.high for b in bars])
    lows = np.array([b.low for b in bars])
    closes = np.array([b.close for b in bars])
    levels = FibLevels(*cfg.levels)

    def level_of(kind: SecondaryKind, raw: float) -> str:
        scaled = ScaledSecondary(kind, raw, abs(raw) / cfg.divisor)
        return classify_level(scaled, levels).value

    n = len(bars)
    macd_offset = cfg.macd_long + cfg.macd_trigger - 2
    triple = macd(closes, cfg.macd_short, cfg.macd_long, cfg.macd_trigger) \
        if n > macd_offset else None
    k, d = cfg.stochastic_k, cfg.stochastic_d
    pair = stochastic(highs, lows, closes, k, d) if n >= k + d - 1 else None
    rows = []
    for t in range(n):
        row: dict = {
            "symbol": periods.symbol,
            "period": t,
            "date": bars[t].date.isoformat(),
            "close": bars[t].close,
        }
        row["macd"] = float(triple.macd_line[t - macd_offset]) \
            if triple is not None and t >= macd_offset else None
        row["macd_signal"] = float(triple.signal_line[t - macd_offset]) \
            if triple is not None and t >= macd_offset else None
        row["macd_histogram"] = float(triple.histogram[t - macd_offset]) \
            if triple is not None and t >= macd_offset else None
        row["rsi"] = rsi(closes[:t + 1], cfg.rsi_window) if t >= cfg.rsi_window else None
        row["rsi_level"] = None if row["rsi"] is None \
            else level_of(SecondaryKind.RSI, row["rsi"])
        row["percent_k"] = float(pair.percent_k[t - (k - 1)]) \
            if pair is not None and t >= k - 1 else None
        row["percent_d"] = float(pair.percent_d[t - (k + d - 2)]) \
            if pair is not None and t >= k + d - 2 else None
        row["williams"] = williams(highs[:t + 1], lows[:t + 1], closes[:t + 1],
                                   cfg.williams_window) \
            if t + 1 >= cfg.williams_window else None
        row["williams_level"] = None if row["williams"] is None \
            else level_of(SecondaryKind.WA, row["williams"])
        rows.append(row)
    return rows


_INDICATOR_COLUMNS = ("symbol", "period", "date", "close", "macd", "macd_signal",
                      "macd_histogram", "rsi", "rsi_level", "percent_k", "percent_d",
                      "williams", "williams_level")


def _cmd_indicators(args, cfg: ResolvedConfig) -> int:
    series_list = _load_series(args.csv)
    if args.symbol:
        series_list = [_pick_symbol(series_list, args.symbol)]
    rows = [row for series in series_list for row in _indicator_rows(series, cfg)]
    if args.format == "json":
        sys.stdout.write(json.dumps(rows, indent=2) + "\n")
    else:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(_INDICATOR_COLUMNS)
        for row in rows:
            writer.writerow(["" if row[c] is None else repr(row[c]) if isinstance(row[c], float)
                             else row[c] for c in _INDICATOR_COLUMNS])
        sys.stdout.write(out.getvalue())
    return 0


def _cmd_signal(args, cfg: ResolvedConfig) -> int:
    series = _pick_symbol(_load_series(args.csv), args.symbol)
    rec = recommend(series, cfg, _load_rules(args))
    if args.format == "json":
        payload = {
            "symbol": rec.symbol,
            "fuzzy_output": rec.crisp,
            "signal": rec.signal.value,
            "centroid_interval": rec.centroid_interval,
            "config_fingerprint": cfg.fingerprint(),
        }
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        line = f"{rec.symbol} fuzzy_output={rec.crisp:.6f} signal={rec.signal.value}"
        if rec.centroid_interval is not None:
            y_l, y_r = rec.centroid_interval
            line += f" centroid_interval=[{y_l:.6f}, {y_r:.6f}]"
        sys.stdout.write(line + "\n")
    return 0


def _cmd_portfolio(args, cfg: ResolvedConfig) -> int:
    series_list = _load_series(args.csv)
    report = run_portfolio(series_list, cfg, rule_base=_load_rules(args))
    sys.stdout.buffer.write(emit_report(report, args.format))
    return 0


def _cmd_backtest(args, cfg: ResolvedConfig) -> int:
    series = _pick_symbol(_load_series(args.csv), args.symbol)
    stats = backtest(series, cfg)
    if args.format == "json":
        payload = {
            "symbol": stats.symbol,
            "buy_hit_rate": stats.buy_hit_rate,
            "sell_hit_rate": stats.sell_hit_rate,
            "records": [
                {"period_index": r.period_index, "date": r.date.isoformat(),
                 "signal": r.signal.value, "next_return": r.next_return}
                for r in stats.records
            ],
        }
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(("symbol", "period_index", "date", "signal", "next_return"))
        for r in stats.records:
            writer.writerow((stats.symbol, r.period_index, r.date.isoformat(),
                             r.signal.value, repr(r.next_return)))
        sys.stdout.write(out.getvalue())
    return 0


def _cmd_rules(args, cfg: ResolvedConfig) -> int:
    base = build_rule_base(cfg.primary_weight, cfg.secondary_weight, cfg.buy_at, cfg.sell_at)
    for line in cfg.canonical_lines():
        if line.startswith("fuzzy."):
            sys.stdout.write(f"# {line}\n")
    sys.stdout.write(rules_to_csv(base, include_scores=True))
    return 0


def _cmd_fixtures(args, cfg: ResolvedConfig) -> int:
    series_list = portfolio_fixture(seed=args.seed, symbols=args.symbols,
                                    periods=args.periods,
                                    days_per_period=cfg.days_per_period)
    data = serialize_csv(series_list)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
    return 0


_COMMANDS = {
    "indicators": _cmd_indicators,
    "signal": _cmd_signal,
    "portfolio": _cmd_portfolio,
    "backtest": _cmd_backtest,
    "rules": _cmd_rules,
    "fixtures": _cmd_fixtures,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage or help
        return int(exc.code or 0)
    try:
        cfg = _resolve_config(args)
        return _COMMANDS[args.command](args, cfg)
    except (ConfigError, MarketDataError, PipelineError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
