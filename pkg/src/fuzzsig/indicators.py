"""Technical indicators on period bars: moving averages, MACD, RSI, stochastic, Williams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .market_data import PriceSeries


class InsufficientHistoryError(ValueError):
    """Series too short for the requested indicator window."""


@dataclass(frozen=True)
class MacdTriple:
    """MACD line, its trigger-period EMA, and their difference, time-aligned."""

    macd_line: np.ndarray
    signal_line: np.ndarray
    histogram: np.ndarray


@dataclass(frozen=True)
class StochasticPair:
    """%K and its d-point moving average %D, both in [0, 100].

    percent_k[i] covers input index k-1+i, percent_d[j] covers k+d-2+j.
    """

    percent_k: np.ndarray
    percent_d: np.ndarray


@dataclass(frozen=True)
class IndicatorSnapshot:
    """Latest value of every indicator plus the latest close, for one series."""

    macd_line: float
    signal_line: float
    histogram: float
    rsi: float
    stochastic_k: float
    williams: float
    close: float


def _require(length: int, needed: int, what: str) -> None:
    if length < needed:
        raise InsufficientHistoryError(f"{what} needs at least {needed} values, got {length}")


def sma(closes, n: int) -> np.ndarray:
    """Simple moving average; output[t] is the mean of the n values ending at t.

    Defined from input index n-1 onward (output length = len - n + 1).
    """
    c = np.asarray(closes, dtype=float)
    if n < 1:
        raise ValueError(f"window must be >= 1, got {n}")
    _require(len(c), n, f"SMA({n})")
    # per-window means (not a running sum) so each value only sees its window
    return sliding_window_view(c, n).mean(axis=1)


def ema(closes, n: int) -> np.ndarray:
    """Exponential moving average seeded with the SMA of the first n values.

    Thereafter out[t] = alpha * close[t] + (1 - alpha) * out[t-1] with
    alpha = 2 / (n + 1). Same alignment as sma().
    """
    c = np.asarray(closes, dtype=float)
    if n < 1:
        raise ValueError(f"window must be >= 1, got {n}")
    _require(len(c), n, f"EMA({n})")
    alpha = 2.0 / (n + 1.0)
    out = np.empty(len(c) - n + 1)
    out[0] = c[:n].mean()
    for i in range(n, len(c)):
        out[i - n + 1] = alpha * c[i] + (1.0 - alpha) * out[i - n]
    return out


def macd(closes, short: int = 12, long: int = 26, trigger: int = 9) -> MacdTriple:
    """MACD line = EMA(short) - EMA(long); signal = EMA(trigger) of the line.

    All three outputs are truncated to the signal line's support, so the
    minimum input length is long + trigger - 1.
    """
    c = np.asarray(closes, dtype=float)
    if not short < long:
        raise ValueError(f"short period must be below long period, got {short}/{long}")
    _require(len(c), long + trigger - 1, f"MACD({short},{long},{trigger})")
    line_full = ema(c, short)[long - short:] - ema(c, long)
    signal = ema(line_full, trigger)
    line = line_full[trigger - 1:]
    return MacdTriple(macd_line=line, signal_line=signal, histogram=line - signal)


def rsi(closes, n: int = 21) -> float:
    """Relative strength index over the last n close-to-close changes.

    Average gain and loss are plain means over the window (zeros counted).
    Flat windows return the neutral 50; all-gain 100; all-loss 0.
    """
    c = np.asarray(closes, dtype=float)
    _require(len(c), n + 1, f"RSI({n})")
    changes = np.diff(c[-(n + 1):])
    gain = float(np.clip(changes, 0.0, None).mean())
    loss = float(np.clip(-changes, 0.0, None).mean())
    if gain == 0.0 and loss == 0.0:
        return 50.0
    if loss == 0.0:
        return 100.0
    return 100.0 - 100.0 / (1.0 + gain / loss)


def stochastic(highs, lows, closes, k: int = 10, d: int = 3) -> StochasticPair:
    """Position of the close inside the trailing k-period high-low range, 0-100.

    %D is the d-point simple average of %K. A degenerate range (highest high
    equal to lowest low) reads as the neutral 50.
    """
    h = np.asarray(highs, dtype=float)
    lo = np.asarray(lows, dtype=float)
    c = np.asarray(closes, dtype=float)
    if not (len(h) == len(lo) == len(c)):
        raise ValueError("highs, lows, and closes must share length")
    _require(len(c), k + d - 1, f"stochastic({k},{d})")
    hh = sliding_window_view(h, k).max(axis=1)
    ll = sliding_window_view(lo, k).min(axis=1)
    span = hh - ll
    aligned = c[k - 1:]
    safe = np.where(span == 0.0, 1.0, span)
    pk = np.where(span == 0.0, 50.0, 100.0 * (aligned - ll) / safe)
    return StochasticPair(percent_k=pk, percent_d=sma(pk, d))


def williams(highs, lows, closes, n: int = 30) -> float:
    """Distance of the latest close below the trailing n-period highest high.

    Scaled to [-100, 0]; a degenerate range reads as the neutral -50.
    Computed as the exact complement of the same-window %K.
    """
    h = np.asarray(highs, dtype=float)
    lo = np.asarray(lows, dtype=float)
    c = np.asarray(closes, dtype=float)
    if not (len(h) == len(lo) == len(c)):
        raise ValueError("highs, lows, and closes must share length")
    _require(len(c), n, f"Williams({n})")
    hh = float(h[-n:].max())
    ll = float(lo[-n:].min())
    if hh == ll:
        return -50.0
    return 100.0 * (float(c[-1]) - ll) / (hh - ll) - 100.0


def snapshot_requirements(
    *,
    macd_short: int = 12,
    macd_long: int = 26,
    macd_trigger: int = 9,
    rsi_window: int = 21,
    stochastic_k: int = 10,
    stochastic_d: int = 3,
    williams_window: int = 30,
) -> dict[str, int]:
    """Minimum period-bar counts per indicator for a full snapshot.

    MACD requires one genuine recursion step past the signal line's SMA seed,
    hence long + trigger rather than long + trigger - 1.
    """
    del macd_short
    return {
        "MACD": macd_long + macd_trigger,
        "RSI": rsi_window + 1,
        "stochastic": stochastic_k + stochastic_d - 1,
        "Williams": williams_window,
    }


def snapshot(
    series: PriceSeries,
    *,
    macd_short: int = 12,
    macd_long: int = 26,
    macd_trigger: int = 9,
    rsi_window: int = 21,
    stochastic_k: int = 10,
    stochastic_d: int = 3,
    williams_window: int = 30,
) -> IndicatorSnapshot:
    """Latest value of each indicator bundled with the latest close."""
    requirements = snapshot_requirements(
        macd_short=macd_short, macd_long=macd_long, macd_trigger=macd_trigger,
        rsi_window=rsi_window, stochastic_k=stochastic_k, stochastic_d=stochastic_d,
        williams_window=williams_window,
    )
    binding, needed = max(requirements.items(), key=lambda kv: (kv[1], kv[0]))
    if len(series.bars) < needed:
        raise InsufficientHistoryError(
            f"snapshot needs at least {needed} period bars "
            f"({binding} is the binding indicator), got {len(series.bars)}"
        )
    highs = np.array([b.high for b in series.bars])
    lows = np.array([b.low for b in series.bars])
    closes = np.array([b.close for b in series.bars])
    triple = macd(closes, macd_short, macd_long, macd_trigger)
    pair = stochastic(highs, lows, closes, stochastic_k, stochastic_d)
    return IndicatorSnapshot(
        macd_line=float(triple.macd_line[-1]),
        signal_line=float(triple.signal_line[-1]),
        histogram=float(triple.histogram[-1]),
        rsi=rsi(closes, rsi_window),
        stochastic_k=float(pair.percent_k[-1]),
        williams=williams(highs, lows, closes, williams_window),
        close=float(closes[-1]),
    )
