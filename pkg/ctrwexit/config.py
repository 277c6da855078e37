"""Run configuration: a flat key=value file, overridable from the command line."""

from __future__ import annotations

import dataclasses
import logging
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ctrwexit.continuum import ContinuumSpec
from ctrwexit.distributions import (
    ErlangWaiting,
    ExponentialJumps,
    ExponentialWaiting,
    JumpModel,
    MixtureJumps,
    OneSidedStableJumps,
    PointMassJumps,
    ProcessSpec,
    TabulatedJumps,
    TabulatedWaiting,
    WaitingTimeModel,
)
from ctrwexit.exceptions import ConfigError, CTRWError
from ctrwexit.sentinels import STEADY_STATE, ObservationTime, is_steady_state

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = "CTRWEXIT_CONFIG"

REGIMES = ("favorable", "adverse", "twosided", "continuum")
WAITING_KINDS = ("erlang", "exponential", "tabulated")
JUMP_KINDS = ("exponential", "stable", "point-mass", "tabulated")
METHODS = (
    "auto",
    "closed-form",
    "transform-inversion",
    "quadrature",
    "integral-equation",
    "monte-carlo",
    "all",
)

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass(frozen=True)
class RunConfig:
    """Every parameter of a compute, simulate, compare or sweep run."""

    regime: str = "favorable"
    waiting: str = "erlang"
    waiting_rate: float = 1.0
    waiting_shape: int = 2
    waiting_table: str | None = None
    jumps: str = "exponential"
    jump_rate: float = 0.1
    jump_scale: float = 1.0
    jump_table: str | None = None
    negative_probability: float = 0.0
    negative_jump_rate: float = 1.0
    ruin_jumps: bool = False
    drift: float = 0.1
    boundary: float = 1.0
    continuum_k: float = 1.0
    x_grid: tuple[float, ...] = field(
        default_factory=lambda: tuple(float(x) for x in np.linspace(0.0, 1.0, 11))
    )
    r_list: tuple[ObservationTime, ...] = (0.0,)
    method: str = "auto"
    paths: int = 100_000
    seed: int = 12345
    workers: int = 1
    tolerance: float = 1e-6
    grid_points: int = 2001
    truncation: float | None = None
    output: str | None = None

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        """Raise ConfigError for out-of-range or unknown values."""
        choices = {
            "regime": REGIMES,
            "waiting": WAITING_KINDS,
            "jumps": JUMP_KINDS,
            "method": METHODS,
        }
        for key, allowed in choices.items():
            if getattr(self, key) not in allowed:
                raise ConfigError(
                    f"Invalid {key} '{getattr(self, key)}'. Must be one of: {', '.join(allowed)}",
                    key=key,
                )
        if not 0.0 <= self.negative_probability <= 1.0:
            raise ConfigError("negative_probability must lie in [0, 1]", key="negative_probability")
        for key in ("paths", "workers", "grid_points", "waiting_shape"):
            if getattr(self, key) < 1:
                raise ConfigError(f"{key} must be at least 1", key=key)
        if self.waiting == "tabulated" and not self.waiting_table:
            raise ConfigError("waiting=tabulated needs waiting_table", key="waiting_table")
        if self.jumps == "tabulated" and not self.jump_table:
            raise ConfigError("jumps=tabulated needs jump_table", key="jump_table")
        if not self.r_list:
            raise ConfigError("r_list must not be empty", key="r_list")

    def replace(self, **overrides: Any) -> RunConfig:
        """Copy with the given fields replaced; None values are ignored."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        """key=value lines in field order; parse_config_text reads them back unchanged."""
        lines = [
            f"{f.name}={_format_value(getattr(self, f.name))}" for f in dataclasses.fields(self)
        ]
        return "\n".join(lines) + "\n"

    def build_waiting(self) -> WaitingTimeModel:
        if self.waiting == "tabulated":
            assert self.waiting_table is not None
            return TabulatedWaiting.from_csv(self.waiting_table)
        if self.waiting == "exponential":
            return ExponentialWaiting(self.waiting_rate)
        return ErlangWaiting(self.waiting_rate, self.waiting_shape)

    def _build_one_sided(self, sign: int) -> JumpModel:
        if self.jumps == "tabulated":
            assert self.jump_table is not None
            return TabulatedJumps.from_csv(self.jump_table)
        if self.jumps == "stable":
            if sign < 0:
                raise ConfigError("Stable jumps are positive only", key="jumps")
            return OneSidedStableJumps(self.jump_scale)
        if self.jumps == "point-mass":
            return PointMassJumps(sign * self.jump_scale)
        return ExponentialJumps(self.jump_rate, sign=sign)

    def build_jumps(self) -> JumpModel:
        if self.regime == "adverse":
            return self._build_one_sided(-1)
        if self.regime == "twosided":
            offset = self.boundary if self.ruin_jumps else 0.0
            negative = ExponentialJumps(self.negative_jump_rate, sign=-1, offset=offset)
            return MixtureJumps(1.0 - self.negative_probability, self._build_one_sided(1), negative)
        return self._build_one_sided(1)

    def build_spec(self) -> ProcessSpec | ContinuumSpec:
        """The process described by this configuration.

        Raises:
            ConfigError: If a model parameter is rejected
        """
        try:
            if self.regime == "continuum":
                return ContinuumSpec(self.drift, self.boundary, self.continuum_k)
            return ProcessSpec(self.drift, self.boundary, self.build_waiting(), self.build_jumps())
        except ConfigError:
            raise
        except CTRWError as e:
            raise ConfigError(f"Invalid model parameters: {e}", details=e.details) from e


def _format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(_format_value(item) for item in value)
    if is_steady_state(value):
        return "inf"
    if isinstance(value, float):
        return "inf" if math.isinf(value) else repr(value)
    return str(value)


def parse_grid(text: str) -> tuple[float, ...]:
    """``start:stop:count`` (inclusive linspace) or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid '{text}' must be start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ValueError("grid count must be at least 1")
        return tuple(float(x) for x in np.linspace(start, stop, count))
    return tuple(float(item) for item in text.split(",") if item.strip())


def parse_times(text: str) -> tuple[ObservationTime, ...]:
    """Comma list of observation times; ``inf`` stands for the steady state."""
    times: list[ObservationTime] = []
    for item in text.split(","):
        item = item.strip().lower()
        if not item:
            continue
        if item in ("inf", "infinity", "steady", "steady-state"):
            times.append(STEADY_STATE)
        else:
            value = float(item)
            if value < 0 or math.isinf(value):
                raise ValueError(f"observation time {value} must be finite and >= 0")
            times.append(value)
    return tuple(times)


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ValueError(f"'{text}' is not a boolean")


def _parse_optional_float(text: str) -> float | None:
    return None if text.lower() in ("", "none") else float(text)


def _parse_optional_str(text: str) -> str | None:
    return None if text.lower() in ("", "none") else text


_PARSERS: dict[str, Any] = {
    "regime": str,
    "waiting": str,
    "waiting_rate": float,
    "waiting_shape": int,
    "waiting_table": _parse_optional_str,
    "jumps": str,
    "jump_rate": float,
    "jump_scale": float,
    "jump_table": _parse_optional_str,
    "negative_probability": float,
    "negative_jump_rate": float,
    "ruin_jumps": _parse_bool,
    "drift": float,
    "boundary": float,
    "continuum_k": float,
    "x_grid": parse_grid,
    "r_list": parse_times,
    "method": str,
    "paths": int,
    "seed": int,
    "workers": int,
    "tolerance": float,
    "grid_points": int,
    "truncation": _parse_optional_float,
    "output": _parse_optional_str,
}


def parse_value(key: str, text: str, line_number: int | None = None) -> Any:
    """Parse one configuration value.

    Raises:
        ConfigError: If the key is unknown or the value does not parse
    """
    if key not in _PARSERS:
        raise ConfigError(f"Unknown configuration key '{key}'", key=key, line_number=line_number)
    try:
        return _PARSERS[key](text.strip())
    except ValueError as e:
        raise ConfigError(
            f"Invalid value for '{key}': {text!r} ({e})", key=key, line_number=line_number
        ) from e


def parse_config_lines(text: str) -> dict[str, Any]:
    """key=value pairs of a config text; blank lines and # comments are skipped."""
    values: dict[str, Any] = {}
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(
                f"Line {number} is not of the form key=value: {line!r}", line_number=number
            )
        key, value = line.split("=", 1)
        key = key.strip()
        values[key] = parse_value(key, value, number)
    return values


def parse_config_text(text: str, base: RunConfig | None = None) -> RunConfig:
    """RunConfig from key=value text; keys not given keep the base (or default) values."""
    values = parse_config_lines(text)
    start = base if base is not None else RunConfig()
    try:
        return dataclasses.replace(start, **values)
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid configuration: {e}") from e


def load_config(path: str | Path, base: RunConfig | None = None) -> RunConfig:
    """Load a key=value run configuration file.

    Raises:
        ConfigError: If the file is missing or malformed
    """
    config_path = Path(path)
    if not config_path.exists():
        raise ConfigError(f"Configuration file not found: {config_path}")
    config = parse_config_text(config_path.read_text(), base)
    logger.debug("Loaded configuration from %s", config_path)
    return config


def default_config_path() -> str | None:
    """Path named by CTRWEXIT_CONFIG, if set."""
    return os.getenv(CONFIG_ENV_VAR) or None
