"""Fibonacci-ratio tuning of the secondary indicators (RSI and Williams)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

DEFAULT_DIVISOR = 89.0


class SecondaryKind(Enum):
    RSI = "rsi"
    WA = "wa"


class Level(Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"


@dataclass(frozen=True)
class FibLevels:
    """Retracement ratios used as thresholds on divisor-scaled indicator values."""

    low_level: float = 0.236
    mid_level: float = 0.382
    golden: float = 0.618

    def __post_init__(self) -> None:
        if not self.low_level < self.mid_level < self.golden:
            raise ValueError(f"levels must ascend, got {self}")


@dataclass(frozen=True)
class ScaledSecondary:
    kind: SecondaryKind
    raw: float
    scaled: float


def golden_ratio() -> float:
    """Reciprocal of (1 + sqrt(5)) / 2, about 0.6180."""
    return 1.0 / ((1.0 + math.sqrt(5.0)) / 2.0)


def scale_secondary(
    kind: SecondaryKind, raw: float, divisor: float = DEFAULT_DIVISOR
) -> ScaledSecondary:
    """Divide |raw| by the Fibonacci divisor; validates the indicator's range.

    RSI must lie in [0, 100] and Williams in [-100, 0], so the scaled value
    lands in [0, 100/divisor].
    """
    if kind is SecondaryKind.RSI:
        if not 0.0 <= raw <= 100.0:
            raise ValueError(f"RSI out of range [0, 100]: {raw}")
    elif kind is SecondaryKind.WA:
        if not -100.0 <= raw <= 0.0:
            raise ValueError(f"Williams value out of range [-100, 0]: {raw}")
    else:
        raise ValueError(f"unknown secondary kind: {kind!r}")
    if divisor <= 0:
        raise ValueError(f"divisor must be positive, got {divisor}")
    return ScaledSecondary(kind=kind, raw=raw, scaled=abs(raw) / divisor)


def classify_level(scaled: ScaledSecondary, levels: FibLevels = FibLevels()) -> Level:
    """Crisp diagnostic label for a scaled secondary value.

    High above the golden level, Medium between the mid and golden levels
    inclusive, Low otherwise. For reporting only; inference uses the graded
    membership functions instead.
    """
    if scaled.scaled > levels.golden:
        return Level.HIGH
    if scaled.scaled >= levels.mid_level:
        return Level.MEDIUM
    return Level.LOW
