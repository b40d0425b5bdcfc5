"""
Size and Bandwidth Accounting
Message sizes per voxel count and Mbit/s at a sensor frequency
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from core.config import Config
from .message import CodecMode, Sublayout

# magic, version, mode, sender, timestamp, pose, level, origin, voxel size, dims, count
HEADER_SIZE = 4 + 1 + 1 + 4 + 8 + 48 + 1 + 12 + 12 + 12 + 4

COORD_BYTES = {Sublayout.COMPAT: 12, Sublayout.PACKED: 6}
MEAN_FEATURE_BYTES = 16


def payload_size(count: int, mode: CodecMode = CodecMode.COORDS_ONLY,
                 sublayout: Sublayout = Sublayout.COMPAT) -> int:
    """
    Bytes after the header for a voxel count
    :param count: Number of voxels
    :param mode: Coordinates only, or coordinates plus F=4 mean features
    :param sublayout: 12 B (compat) or 6 B (packed) coordinate records
    :return: Payload bytes
    """
    if count < 0:
        raise ValueError(f"voxel count must be non-negative, got {count}")
    per_voxel = COORD_BYTES[Sublayout(sublayout)]
    if CodecMode(mode) == CodecMode.COORDS_PLUS_MEAN:
        per_voxel += MEAN_FEATURE_BYTES
    return per_voxel * count


def message_size(count: int, mode: CodecMode = CodecMode.COORDS_ONLY,
                 sublayout: Sublayout = Sublayout.COMPAT) -> int:
    """Exact encoded length of a message with count voxels"""
    return HEADER_SIZE + payload_size(count, mode, sublayout)


def raw_cloud_size(points: int) -> int:
    """Early fusion baseline: every point as 4 x f32"""
    if points < 0:
        raise ValueError(f"point count must be non-negative, got {points}")
    return Config.RAW_BYTES_PER_POINT * points


def truncate_tenths(value: Fraction) -> str:
    """One decimal, truncated toward zero, from an exact value"""
    tenths = math.floor(value * 10)
    return f"{tenths // 10}.{tenths % 10}"


@dataclass(frozen=True)
class SizeReport:
    frame_bytes: int
    frequency: float
    bandwidth_mbps: float

    @property
    def exact_mbps(self) -> Fraction:
        return Fraction(self.frame_bytes) * 8 * Fraction(self.frequency) / 10 ** 6

    @property
    def display(self) -> str:
        """Mbit/s truncated (not rounded) to one decimal"""
        return truncate_tenths(self.exact_mbps)


def bandwidth(frame_bytes: int, frequency: float = Config.FREQUENCY_HZ) -> SizeReport:
    """
    Decimal Mbit/s needed to send frame_bytes at frequency Hz
    :param frame_bytes: Bytes per frame
    :param frequency: Frames per second
    :return: SizeReport
    """
    if not frequency > 0:
        raise ValueError(f"frequency must be positive, got {frequency}")
    if frame_bytes < 0:
        raise ValueError(f"frame size must be non-negative, got {frame_bytes}")
    return SizeReport(frame_bytes, frequency, frame_bytes * 8 * frequency / 1e6)


def display_mbps(mbps: float) -> str:
    """Truncated one-decimal display of an already computed Mbit/s value"""
    return truncate_tenths(Fraction(mbps).limit_denominator(10 ** 9))


def reduction_vs_raw(frame_bytes: int, raw_bytes: int = Config.RAW_FRAME_BYTES) -> float:
    """Bandwidth saved against sending the raw cloud, in percent"""
    if raw_bytes <= 0:
        raise ValueError("raw size must be positive")
    return 100.0 * (1.0 - frame_bytes / raw_bytes)
