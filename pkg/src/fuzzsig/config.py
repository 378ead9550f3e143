"""Runtime configuration: defaults, key-value file parsing, and fingerprinting.

The config file format is line-oriented text with dotted section keys, e.g.

    fuzzy.delta = 0.05
    indicators.rsi_window = 21
    fuzzy.wa.high = gaussian 0.618 0.22

Blank lines and `#` comments are ignored. Precedence is defaults, then file,
then command-line flags.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .fuzzy import (
    Gaussian,
    LeftShoulder,
    MembershipFunction,
    RightShoulder,
    Triangular,
    default_mf_table,
)


class ConfigError(ValueError):
    """Bad configuration key, value, or combination."""


_MF_SHAPES = {
    "triangular": (Triangular, 3),
    "leftshoulder": (LeftShoulder, 2),
    "rightshoulder": (RightShoulder, 2),
    "gaussian": (Gaussian, 2),
}

_MF_NAMES = {Triangular: "triangular", LeftShoulder: "leftshoulder",
             RightShoulder: "rightshoulder", Gaussian: "gaussian"}


def parse_mf(text: str) -> MembershipFunction:
    parts = text.split()
    if not parts:
        raise ConfigError("empty membership function value")
    shape = parts[0].lower()
    if shape not in _MF_SHAPES:
        raise ConfigError(f"unknown membership function shape {shape!r}")
    cls, arity = _MF_SHAPES[shape]
    if len(parts) - 1 != arity:
        raise ConfigError(f"{shape} takes {arity} parameters, got {len(parts) - 1}")
    try:
        params = [float(p) for p in parts[1:]]
    except ValueError:
        raise ConfigError(f"non-numeric membership function parameter in {text!r}") from None
    try:
        return cls(*params)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def format_mf(mf: MembershipFunction) -> str:
    name = _MF_NAMES[type(mf)]
    if isinstance(mf, Triangular):
        params = (mf.left, mf.peak, mf.right)
    elif isinstance(mf, LeftShoulder):
        params = (mf.plateau_end, mf.foot)
    elif isinstance(mf, RightShoulder):
        params = (mf.foot, mf.plateau_start)
    else:
        params = (mf.center, mf.width)
    return " ".join([name] + [repr(p) for p in params])


@dataclass
class ResolvedConfig:
    """Every tunable of the pipeline, with defaults matching the canonical tables."""

    days_per_period: int = 15
    macd_short: int = 12
    macd_long: int = 26
    macd_trigger: int = 9
    rsi_window: int = 21
    stochastic_k: int = 10
    stochastic_d: int = 3
    williams_window: int = 30
    divisor: float = 89.0
    levels: tuple[float, float, float] = (0.236, 0.382, 0.618)
    delta: float = 0.05
    histogram_gain: float = 50.0
    mf_table: dict[str, tuple[tuple[str, MembershipFunction], ...]] = field(
        default_factory=default_mf_table
    )
    primary_weight: int = 2
    secondary_weight: int = 1
    buy_at: int = 2
    sell_at: int = -2
    grid_points: int = 1001

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        positive_ints = {
            "days_per_period": self.days_per_period,
            "macd_short": self.macd_short,
            "macd_long": self.macd_long,
            "macd_trigger": self.macd_trigger,
            "rsi_window": self.rsi_window,
            "stochastic_k": self.stochastic_k,
            "stochastic_d": self.stochastic_d,
            "williams_window": self.williams_window,
            "primary_weight": self.primary_weight,
            "secondary_weight": self.secondary_weight,
        }
        for name, value in positive_ints.items():
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if not self.macd_short < self.macd_long:
            raise ConfigError(
                f"macd_short must be below macd_long, got {self.macd_short}/{self.macd_long}"
            )
        if self.divisor <= 0:
            raise ConfigError(f"tuning divisor must be positive, got {self.divisor}")
        if len(self.levels) != 3 or not self.levels[0] < self.levels[1] < self.levels[2]:
            raise ConfigError(f"tuning levels must be three ascending ratios, got {self.levels}")
        if self.delta < 0:
            raise ConfigError(f"delta must be >= 0, got {self.delta}")
        if self.histogram_gain <= 0:
            raise ConfigError(f"histogram_gain must be positive, got {self.histogram_gain}")
        if not self.sell_at < self.buy_at:
            raise ConfigError(f"sell_at must be below buy_at, got {self.sell_at}/{self.buy_at}")
        if self.grid_points < 3:
            raise ConfigError(f"grid_points must be >= 3, got {self.grid_points}")
        expected_terms = {name: tuple(t for t, _ in terms)
                          for name, terms in default_mf_table().items()}
        for var, terms in self.mf_table.items():
            if var not in expected_terms:
                raise ConfigError(f"unknown fuzzy variable {var!r}")
            if tuple(t for t, _ in terms) != expected_terms[var]:
                raise ConfigError(
                    f"variable {var!r} must keep terms {expected_terms[var]}, "
                    f"got {tuple(t for t, _ in terms)}"
                )

    def canonical_lines(self) -> list[str]:
        """Stable `key = value` rendering of every setting, sorted by key."""
        entries: dict[str, str] = {
            "data.days_per_period": str(self.days_per_period),
            "indicators.macd_short": str(self.macd_short),
            "indicators.macd_long": str(self.macd_long),
            "indicators.macd_trigger": str(self.macd_trigger),
            "indicators.rsi_window": str(self.rsi_window),
            "indicators.stochastic_k": str(self.stochastic_k),
            "indicators.stochastic_d": str(self.stochastic_d),
            "indicators.williams_window": str(self.williams_window),
            "tuning.divisor": repr(self.divisor),
            "tuning.levels": ", ".join(repr(v) for v in self.levels),
            "fuzzy.delta": repr(self.delta),
            "fuzzy.histogram_gain": repr(self.histogram_gain),
            "rules.primary_weight": str(self.primary_weight),
            "rules.secondary_weight": str(self.secondary_weight),
            "rules.buy_at": str(self.buy_at),
            "rules.sell_at": str(self.sell_at),
            "output.grid_points": str(self.grid_points),
        }
        for var, terms in self.mf_table.items():
            for label, mf in terms:
                entries[f"fuzzy.{var}.{label}"] = format_mf(mf)
        return [f"{key} = {entries[key]}" for key in sorted(entries)]

    def fingerprint(self) -> str:
        digest = hashlib.sha256("\n".join(self.canonical_lines()).encode("utf-8"))
        return digest.hexdigest()[:12]


_INT_KEYS = {
    "data.days_per_period": "days_per_period",
    "indicators.macd_short": "macd_short",
    "indicators.macd_long": "macd_long",
    "indicators.macd_trigger": "macd_trigger",
    "indicators.rsi_window": "rsi_window",
    "indicators.stochastic_k": "stochastic_k",
    "indicators.stochastic_d": "stochastic_d",
    "indicators.williams_window": "williams_window",
    "rules.primary_weight": "primary_weight",
    "rules.secondary_weight": "secondary_weight",
    "rules.buy_at": "buy_at",
    "rules.sell_at": "sell_at",
    "output.grid_points": "grid_points",
}

_FLOAT_KEYS = {
    "tuning.divisor": "divisor",
    "fuzzy.delta": "delta",
    "fuzzy.histogram_gain": "histogram_gain",
}


def parse_config_text(text: str, base: ResolvedConfig | None = None) -> ResolvedConfig:
    """Parse key-value lines on top of `base` (defaults when omitted)."""
    cfg = base if base is not None else ResolvedConfig()
    fields = {
        name: getattr(cfg, name)
        for name in (
            "days_per_period", "macd_short", "macd_long", "macd_trigger", "rsi_window",
            "stochastic_k", "stochastic_d", "williams_window", "divisor", "levels",
            "delta", "histogram_gain", "primary_weight", "secondary_weight",
            "buy_at", "sell_at", "grid_points",
        )
    }
    mf_table = {var: list(terms) for var, terms in cfg.mf_table.items()}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            if key in _INT_KEYS:
                fields[_INT_KEYS[key]] = int(value)
            elif key in _FLOAT_KEYS:
                fields[_FLOAT_KEYS[key]] = float(value)
            elif key == "tuning.levels":
                parts = [float(p) for p in value.split(",")]
                if len(parts) != 3:
                    raise ConfigError("tuning.levels takes exactly three ratios")
                fields["levels"] = tuple(parts)
            elif key.startswith("fuzzy.") and key.count(".") == 2:
                _, var, label = key.split(".")
                if var not in mf_table:
                    raise ConfigError(f"unknown fuzzy variable {var!r}")
                labels = [t for t, _ in mf_table[var]]
                if label not in labels:
                    raise ConfigError(f"variable {var!r} has no term {label!r}")
                mf = parse_mf(value)
                mf_table[var][labels.index(label)] = (label, mf)
            else:
                raise ConfigError(f"unknown config key {key!r}")
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value {value!r} for {key!r}") from None
    fields["mf_table"] = {var: tuple(terms) for var, terms in mf_table.items()}
    return ResolvedConfig(**fields)


def load_config_file(path: str, base: ResolvedConfig | None = None) -> ResolvedConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from None
    return parse_config_text(text, base)
