"""
Channel Model
Range gating, channel settings and per-frame / aggregate bandwidth reports
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from codec import CodecMode, Sublayout
from codec.sizes import truncate_tenths
from core.config import Config, RunConfig
from core.errors import ConfigError, ScenarioError
from grid import GridSpec, Level, Pose, canonical_specs


def filter_in_range(ego: Pose, others: Iterable[Tuple[int, Pose]], range_m: float) -> List[int]:
    """
    Ids whose planar distance to the ego is at most range_m (boundary included)
    :param ego: Ego pose
    :param others: (id, pose) of the other vehicles
    :param range_m: Communication range in meters
    :return: Ids in input order
    """
    if not range_m > 0:
        raise ValueError(f"communication range must be positive, got {range_m}")
    return [vid for vid, pose in others if ego.planar_distance(pose) <= range_m]


@dataclass(frozen=True)
class ChannelConfig:
    frequency: float = Config.FREQUENCY_HZ
    comm_range: float = Config.COMM_RANGE_M
    capacity: Optional[float] = None
    mode: CodecMode = CodecMode.COORDS_ONLY
    sublayout: Sublayout = Sublayout.COMPAT
    extent: Tuple[float, float, float] = Config.GRID_EXTENT
    origin: Tuple[float, float, float] = Config.GRID_ORIGIN

    def __post_init__(self):
        for name in ("frequency", "comm_range"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.capacity is not None and not self.capacity > 0:
            raise ConfigError(f"capacity must be positive, got {self.capacity}")
        object.__setattr__(self, "mode", CodecMode(self.mode))
        object.__setattr__(self, "sublayout", Sublayout(self.sublayout))

    @classmethod
    def from_run_config(cls, rc: RunConfig) -> "ChannelConfig":
        return cls(rc.frequency, rc.comm_range, rc.capacity, CodecMode.from_name(rc.mode),
                   Sublayout.from_name(rc.sublayout), tuple(rc.extent), tuple(rc.origin))

    def specs(self) -> Dict[Level, GridSpec]:
        return canonical_specs(self.extent, self.origin)


def _mbps(frame_bytes: int, frequency: float) -> Fraction:
    return Fraction(frame_bytes) * 8 * Fraction(frequency) / 10 ** 6


@dataclass(frozen=True)
class FrameReport:
    """Byte counts are lengths of actually encoded messages"""

    timestamp: int
    ego_id: int
    message_bytes: Mapping[int, int]
    assignment: Mapping[int, Level]
    in_range: int
    dropped: int
    frequency: float = Config.FREQUENCY_HZ

    @property
    def total_bytes(self) -> int:
        return sum(self.message_bytes.values())

    @property
    def exact_mbps(self) -> Fraction:
        return _mbps(self.total_bytes, self.frequency)

    @property
    def bandwidth_mbps(self) -> float:
        return float(self.exact_mbps)

    @property
    def display(self) -> str:
        return truncate_tenths(self.exact_mbps)

    @property
    def unassigned(self) -> int:
        """In range but left out by the strategy"""
        return self.in_range - len(self.assignment)

    def row(self) -> Dict[str, object]:
        levels = {level.label: 0 for level in Level}
        for level in self.assignment.values():
            levels[level.label] += 1
        return {
            "timestamp_us": self.timestamp,
            "ego_id": self.ego_id,
            "in_range": self.in_range,
            "out_of_range": self.dropped,
            **levels,
            "total_bytes": self.total_bytes,
            "mbps": self.display,
        }


@dataclass(frozen=True)
class AggregateReport:
    frames: Tuple[FrameReport, ...]
    strategy: str = ""
    seed: Optional[int] = None
    extra: Dict[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.frames:
            raise ScenarioError("cannot aggregate an empty scenario")
        object.__setattr__(self, "frames", tuple(self.frames))

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    @property
    def message_count(self) -> int:
        return sum(len(f.message_bytes) for f in self.frames)

    @property
    def total_bytes(self) -> int:
        return sum(f.total_bytes for f in self.frames)

    @property
    def mean_exact(self) -> Fraction:
        """Mean frame bandwidth"""
        return sum((f.exact_mbps for f in self.frames), Fraction(0)) / len(self.frames)

    @property
    def max_exact(self) -> Fraction:
        return max(f.exact_mbps for f in self.frames)

    @property
    def vehicle_mean_exact(self) -> Fraction:
        """Mean bandwidth of a single vehicle's message stream"""
        total = sum((_mbps(b, f.frequency) for f in self.frames for b in f.message_bytes.values()), Fraction(0))
        return total / self.message_count if self.message_count else Fraction(0)

    @property
    def mean_mbps(self) -> float:
        return float(self.mean_exact)

    @property
    def max_mbps(self) -> float:
        return float(self.max_exact)

    @property
    def vehicle_mean_mbps(self) -> float:
        return float(self.vehicle_mean_exact)

    def level_histogram(self) -> Dict[str, int]:
        histogram = {level.label: 0 for level in Level}
        histogram["unassigned"] = 0
        histogram["out_of_range"] = 0
        for f in self.frames:
            for level in f.assignment.values():
                histogram[level.label] += 1
            histogram["unassigned"] += f.unassigned
            histogram["out_of_range"] += f.dropped
        return histogram

    def summary(self) -> Dict[str, object]:
        """Flat, timing-free key/value view used by reports and golden files"""
        summary: Dict[str, object] = {
            "strategy": self.strategy,
            "seed": "" if self.seed is None else self.seed,
            "frames": self.frame_count,
            "messages": self.message_count,
            "total_bytes": self.total_bytes,
            "mean_mbps": truncate_tenths(self.mean_exact),
            "max_mbps": truncate_tenths(self.max_exact),
            "vehicle_mean_mbps": truncate_tenths(self.vehicle_mean_exact),
            "mean_mbps_exact": f"{self.mean_mbps:.6f}",
            "max_mbps_exact": f"{self.max_mbps:.6f}",
            "vehicle_mean_mbps_exact": f"{self.vehicle_mean_mbps:.6f}",
        }
        summary.update({f"level_{k}": v for k, v in self.level_histogram().items()})
        summary.update(self.extra)
        return summary


def aggregate(frames: Sequence[FrameReport], strategy: str = "", seed: Optional[int] = None) -> AggregateReport:
    return AggregateReport(tuple(frames), strategy, seed)
