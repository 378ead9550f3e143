"""Membership functions, linguistic variables, and fuzzification of snapshots.

Triangular-family shapes serve RSI and the stochastic, Gaussians serve MACD and
Williams. Every shape also exposes an interval ([lower, upper]) grade under a
footprint-of-uncertainty blur: a breakpoint shift of +/- delta for the
piecewise-linear shapes, a width spread of +/- delta for Gaussians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .indicators import IndicatorSnapshot
from .tuning import DEFAULT_DIVISOR, SecondaryKind, scale_secondary

COVERAGE_FLOOR = 0.05
_COVERAGE_GRID = 1001
_MIN_GAUSSIAN_WIDTH = 1e-12


def _eval_scalar_or_array(x):
    arr = np.asarray(x, dtype=float)
    return np.atleast_1d(arr), arr.ndim == 0


@dataclass(frozen=True)
class Triangular:
    """Linear rise from left to 1 at peak, linear fall to right, 0 outside."""

    left: float
    peak: float
    right: float

    def __post_init__(self) -> None:
        if not self.left <= self.peak <= self.right:
            raise ValueError(f"need left <= peak <= right, got {self}")

    def grade(self, x):
        arr, scalar = _eval_scalar_or_array(x)
        out = np.zeros_like(arr)
        if self.peak > self.left:
            m = (arr >= self.left) & (arr < self.peak)
            out[m] = (arr[m] - self.left) / (self.peak - self.left)
        if self.right > self.peak:
            m = (arr > self.peak) & (arr <= self.right)
            out[m] = (self.right - arr[m]) / (self.right - self.peak)
        out[arr == self.peak] = 1.0
        return float(out[0]) if scalar else out

    def grade_bounds(self, x: float, delta: float) -> tuple[float, float]:
        # Unimodal, so the envelope extremes sit at the shifted endpoints,
        # except that the peak dominates whenever the blur window reaches it.
        lo = min(self.grade(x - delta), self.grade(x + delta))
        if x - delta <= self.peak <= x + delta:
            return lo, 1.0
        return lo, max(self.grade(x - delta), self.grade(x + delta))


@dataclass(frozen=True)
class LeftShoulder:
    """Full membership up to plateau_end, falling linearly to 0 at foot."""

    plateau_end: float
    foot: float

    def __post_init__(self) -> None:
        if not self.plateau_end <= self.foot:
            raise ValueError(f"need plateau_end <= foot, got {self}")

    def grade(self, x):
        arr, scalar = _eval_scalar_or_array(x)
        out = np.zeros_like(arr)
        out[arr <= self.plateau_end] = 1.0
        if self.foot > self.plateau_end:
            m = (arr > self.plateau_end) & (arr < self.foot)
            out[m] = (self.foot - arr[m]) / (self.foot - self.plateau_end)
        return float(out[0]) if scalar else out

    def grade_bounds(self, x: float, delta: float) -> tuple[float, float]:
        lo = min(self.grade(x - delta), self.grade(x + delta))
        hi = 1.0 if x - delta <= self.plateau_end else self.grade(x - delta)
        return lo, hi


@dataclass(frozen=True)
class RightShoulder:
    """Zero membership up to foot, rising linearly to 1 at plateau_start."""

    foot: float
    plateau_start: float

    def __post_init__(self) -> None:
        if not self.foot <= self.plateau_start:
            raise ValueError(f"need foot <= plateau_start, got {self}")

    def grade(self, x):
        arr, scalar = _eval_scalar_or_array(x)
        out = np.zeros_like(arr)
        out[arr >= self.plateau_start] = 1.0
        if self.plateau_start > self.foot:
            m = (arr > self.foot) & (arr < self.plateau_start)
            out[m] = (arr[m] - self.foot) / (self.plateau_start - self.foot)
        return float(out[0]) if scalar else out

    def grade_bounds(self, x: float, delta: float) -> tuple[float, float]:
        lo = min(self.grade(x - delta), self.grade(x + delta))
        hi = 1.0 if x + delta >= self.plateau_start else self.grade(x + delta)
        return lo, hi


@dataclass(frozen=True)
class Gaussian:
    """exp(-((x - center) / width)^2 / 2); strictly positive, 1 at center."""

    center: float
    width: float

    def __post_init__(self) -> None:
        if not self.width > 0:
            raise ValueError(f"width must be positive, got {self}")

    def grade(self, x):
        arr, scalar = _eval_scalar_or_array(x)
        z = (arr - self.center) / self.width
        out = np.exp(-0.5 * z * z)
        return float(out[0]) if scalar else out

    def grade_bounds(self, x: float, delta: float) -> tuple[float, float]:
        # Width blur only: the center never moves, so x == center stays [1, 1].
        hi = Gaussian(self.center, self.width + delta).grade(x)
        lo = Gaussian(self.center, max(self.width - delta, _MIN_GAUSSIAN_WIDTH)).grade(x)
        return lo, hi


MembershipFunction = Triangular | LeftShoulder | RightShoulder | Gaussian


@dataclass(frozen=True)
class FootprintOfUncertainty:
    """Non-negative blur applied to every membership function; 0 means type-1."""

    delta: float = 0.05

    def __post_init__(self) -> None:
        if self.delta < 0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")


def eval_mf(mf: MembershipFunction, x: float) -> float:
    return mf.grade(x)


def eval_mf_interval(
    mf: MembershipFunction, fou: FootprintOfUncertainty, x: float
) -> tuple[float, float]:
    """[min, max] of the type-1 grade over the delta-blurred parameter set."""
    return mf.grade_bounds(x, fou.delta)


@dataclass(frozen=True)
class LinguisticVariable:
    """Named domain interval with labelled term membership functions.

    Construction verifies coverage: the strongest term grade must stay at or
    above COVERAGE_FLOOR at every point of a 1001-point domain grid.
    """

    name: str
    domain: tuple[float, float]
    terms: tuple[tuple[str, MembershipFunction], ...]

    def __post_init__(self) -> None:
        lo, hi = self.domain
        if not lo < hi:
            raise ValueError(f"{self.name!r}: domain must be a proper interval, got {self.domain}")
        if not self.terms:
            raise ValueError(f"{self.name!r}: needs at least one term")
        grid = np.linspace(lo, hi, _COVERAGE_GRID)
        cover = np.max([mf.grade(grid) for _, mf in self.terms], axis=0)
        worst = int(np.argmin(cover))
        if cover[worst] < COVERAGE_FLOOR:
            raise ValueError(
                f"{self.name!r}: terms cover x={grid[worst]:.4f} at grade "
                f"{cover[worst]:.4f}, below the {COVERAGE_FLOOR} floor"
            )

    def term_names(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.terms)

    def mf(self, label: str) -> MembershipFunction:
        for name, mf in self.terms:
            if name == label:
                return mf
        raise ValueError(f"{self.name!r} has no term {label!r}")


@dataclass(frozen=True)
class FuzzifiedInputs:
    """Per-variable, per-term membership grades as (lower, upper) pairs.

    For type-1 evaluation (interval=False) lower equals upper exactly.
    """

    grades: dict[str, dict[str, tuple[float, float]]]
    interval: bool


def default_mf_table() -> dict[str, tuple[tuple[str, MembershipFunction], ...]]:
    """Canonical term tables for the four inputs and the output."""
    return {
        "macd": (
            ("low", Gaussian(-0.5, 0.3)),
            ("high", Gaussian(0.5, 0.3)),
        ),
        "rsi": (
            ("low", LeftShoulder(0.236, 0.382)),
            ("medium", Triangular(0.236, 0.5, 0.764)),
            ("high", RightShoulder(0.5, 0.618)),
        ),
        "so": (
            ("low", LeftShoulder(0.2, 0.5)),
            ("medium", Triangular(0.2, 0.5, 0.8)),
            ("high", RightShoulder(0.5, 0.8)),
        ),
        "wa": (
            ("low", Gaussian(0.236, 0.22)),
            ("high", Gaussian(0.618, 0.22)),
        ),
        "signal": (
            ("sell", LeftShoulder(0.3, 0.45)),
            ("hold", Triangular(0.35, 0.5, 0.65)),
            ("buy", RightShoulder(0.55, 0.7)),
        ),
    }


VARIABLE_ORDER = ("macd", "rsi", "so", "wa", "signal")


def default_variables(
    *, divisor: float = DEFAULT_DIVISOR, mf_table=None
) -> tuple[LinguisticVariable, ...]:
    """The four input variables plus the output variable over their domains.

    RSI and Williams live on [0, 100/divisor] (divisor-scaled absolute values),
    the stochastic on [0, 1] (%K / 100), MACD on [-1, 1] (tanh-squashed
    histogram), and the output on [0, 1].
    """
    table = default_mf_table() if mf_table is None else mf_table
    secondary_top = 100.0 / divisor
    domains = {
        "macd": (-1.0, 1.0),
        "rsi": (0.0, secondary_top),
        "so": (0.0, 1.0),
        "wa": (0.0, secondary_top),
        "signal": (0.0, 1.0),
    }
    return tuple(
        LinguisticVariable(name, domains[name], tuple(table[name]))
        for name in VARIABLE_ORDER
    )


def normalize_snapshot(
    snap: IndicatorSnapshot,
    *,
    divisor: float = DEFAULT_DIVISOR,
    histogram_gain: float = 50.0,
) -> dict[str, float]:
    """Map raw indicator values onto the input variables' normalized domains."""
    return {
        "macd": math.tanh(histogram_gain * snap.histogram / snap.close),
        "rsi": scale_secondary(SecondaryKind.RSI, snap.rsi, divisor).scaled,
        "so": snap.stochastic_k / 100.0,
        "wa": scale_secondary(SecondaryKind.WA, snap.williams, divisor).scaled,
    }


def fuzzify(
    snap: IndicatorSnapshot,
    variables: tuple[LinguisticVariable, ...],
    *,
    divisor: float = DEFAULT_DIVISOR,
    histogram_gain: float = 50.0,
    fou: FootprintOfUncertainty | None = None,
) -> FuzzifiedInputs:
    """Grade every input variable's terms at the snapshot's normalized values.

    With fou=None the grades are type-1 (degenerate pairs); with a footprint
    they are [lower, upper] intervals, even at delta = 0.
    """
    normalized = normalize_snapshot(snap, divisor=divisor, histogram_gain=histogram_gain)
    grades: dict[str, dict[str, tuple[float, float]]] = {}
    for var in variables:
        if var.name not in normalized:
            continue
        x = normalized[var.name]
        per_term: dict[str, tuple[float, float]] = {}
        for label, mf in var.terms:
            if fou is None:
                g = mf.grade(x)
                per_term[label] = (g, g)
            else:
                per_term[label] = mf.grade_bounds(x, fou.delta)
        grades[var.name] = per_term
    return FuzzifiedInputs(grades=grades, interval=fou is not None)
