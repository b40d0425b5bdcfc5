"""
Configuration Management
Centralized constants for grids, network, channel and codec, plus the key=value run config
"""

import dataclasses
import os
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from .errors import ConfigError


class Config:
    """Centralized configuration for all modules"""

    # Grid volume in the ego frame: x in [-140, 140], y in [-40, 40], z in [-3, 1]
    GRID_EXTENT = (280.0, 80.0, 4.0)
    GRID_ORIGIN = (-140.0, -40.0, -3.0)
    # Scaled volume for desk-scale forward runs (all three pitches divide it)
    REDUCED_EXTENT = (16.0, 4.8, 4.0)
    REDUCED_ORIGIN = (-8.0, -2.4, -3.0)

    # High resolution voxel pitch; Medium and Low double it per level
    HIGH_VOXEL_SIZE = (0.05, 0.05, 0.10)

    # Network layout
    BLOCK_CHANNELS = (16, 32, 64, 64)
    FINAL_CHANNELS = 64
    STRIDED_BLOCKS = {
        "local": (1, 2, 3),
        "high": (1, 2, 3),
        "medium": (2, 3),
        "low": (3,),
    }
    NORM_EPS = 1e-3
    CENTER_FEATURES = 3
    MEAN_FEATURES = 4

    # Channel model
    FREQUENCY_HZ = 10.0
    COMM_RANGE_M = 70.0
    MIN_VEHICLES = 2
    MAX_VEHICLES = 7
    FRAME_INTERVAL_US = 100_000
    STRATEGY_HISTORY = 100  # most recent assignments kept per strategy

    # Average message sizes per level in bytes (1 kB = 1000 B)
    RAW_FRAME_BYTES = 914_900
    LEVEL_FRAME_BYTES = {"high": 180_000, "medium": 111_000, "low": 54_500}
    RAW_BYTES_PER_POINT = 16

    # Synthetic scene generator
    SENSOR_RANGE_M = 120.0
    POINTS_PER_VEHICLE = 30_000

    # Seeds
    DEFAULT_SEED = 42

    # UI Settings
    BANNER_FONT = "slant"

    # Report Settings
    DEFAULT_REPORT_FORMAT = "txt"


def _floats(value: str, count: int, key: str) -> Tuple[float, ...]:
    parts = [p for p in value.replace(",", " ").split() if p]
    if len(parts) != count:
        raise ConfigError(f"'{key}' expects {count} numbers, got '{value}'")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"'{key}' is not numeric: '{value}'") from None


def _choice(value: str, choices: Tuple[str, ...], key: str) -> str:
    value = value.strip().lower()
    if value not in choices:
        raise ConfigError(f"'{key}' must be one of {', '.join(choices)}, got '{value}'")
    return value


def _positive(value: str, key: str) -> float:
    try:
        number = float(value)
    except ValueError:
        raise ConfigError(f"'{key}' is not numeric: '{value}'") from None
    if not number > 0:
        raise ConfigError(f"'{key}' must be positive, got {value}")
    return number


def parse_threads(value: str) -> int:
    if value.strip().lower() == "max":
        return os.cpu_count() or 1
    try:
        threads = int(value)
    except ValueError:
        raise ConfigError(f"'threads' must be an integer or 'max', got '{value}'") from None
    if threads < 1:
        raise ConfigError(f"'threads' must be at least 1, got {threads}")
    return threads


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by all commands; defaults are the canonical values"""

    extent: Tuple[float, float, float] = Config.GRID_EXTENT
    origin: Tuple[float, float, float] = Config.GRID_ORIGIN
    mode: str = "coords"
    sublayout: str = "compat"
    features: str = "center"
    frequency: float = Config.FREQUENCY_HZ
    comm_range: float = Config.COMM_RANGE_M
    capacity: Optional[float] = None
    weights: Optional[str] = None
    seed: int = Config.DEFAULT_SEED
    threads: int = 1
    output: Optional[str] = None
    source: Optional[str] = field(default=None, compare=False)

    def with_overrides(self, **overrides) -> "RunConfig":
        """
        Return a copy with every non-None override applied (command flags win)
        :param overrides: Field values keyed by field name
        :return: New RunConfig
        """
        known = {f.name for f in dataclasses.fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ConfigError(f"Unknown config key(s): {', '.join(sorted(unknown))}")
        changes = {k: v for k, v in overrides.items() if v is not None}
        return dataclasses.replace(self, **changes)


_PARSERS = {
    "extent": lambda v: _floats(v, 3, "extent"),
    "origin": lambda v: _floats(v, 3, "origin"),
    "mode": lambda v: _choice(v, ("coords", "mean"), "mode"),
    "sublayout": lambda v: _choice(v, ("compat", "packed"), "sublayout"),
    "features": lambda v: _choice(v, ("center", "mean"), "features"),
    "frequency": lambda v: _positive(v, "frequency"),
    "comm_range": lambda v: _positive(v, "comm_range"),
    "capacity": lambda v: None if v.strip().lower() in ("", "none") else _positive(v, "capacity"),
    "weights": lambda v: v.strip() or None,
    "seed": lambda v: _seed(v),
    "threads": parse_threads,
    "output": lambda v: v.strip() or None,
}


def _seed(value: str) -> int:
    try:
        seed = int(value)
    except ValueError:
        raise ConfigError(f"'seed' must be an integer, got '{value}'") from None
    if not 0 <= seed < 2 ** 64:
        raise ConfigError(f"'seed' must fit an unsigned 64-bit integer, got {seed}")
    return seed


def parse_config_text(text: str, source: str = "<string>") -> RunConfig:
    """
    Parse key=value lines into a RunConfig
    :param text: File contents
    :param source: Name used in error messages
    :return: Parsed RunConfig
    """
    values: Dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got '{raw.strip()}'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"{source}:{lineno}: unknown key '{key}'")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key '{key}'")
        values[key] = _PARSERS[key](value)
    return RunConfig(source=source, **values)


def load_config(path: Optional[str]) -> RunConfig:
    """
    Load a config file; None yields the canonical defaults
    :param path: Path to a key=value file
    :return: RunConfig
    """
    if path is None:
        return RunConfig()
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"Cannot read config '{path}': {e.strerror}") from None
    return parse_config_text(text, source=path)
