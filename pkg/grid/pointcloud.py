"""
Point Clouds
(x, y, z, intensity) rows in a sensor frame, plus the PCF1 file format
"""

import struct
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from core.errors import TruncatedMessage, UnsupportedFormat
from .pose import Pose

PCF_MAGIC = b"PCF1"
_PCF_HEADER = struct.Struct("<4sI")
_POINT_DTYPE = np.dtype("<f4")


@dataclass(frozen=True, eq=False)
class PointCloud:
    """points is an (N, 4) array: x, y, z in meters and intensity in [0, 1]"""

    points: np.ndarray
    frame_pose: Pose = field(default_factory=Pose.identity)

    def __post_init__(self):
        points = np.array(self.points, dtype=np.float64, copy=True)
        if points.size == 0:
            points = points.reshape(0, 4)
        if points.ndim != 2 or points.shape[1] != 4:
            raise ValueError(f"PointCloud needs an (N, 4) array, got {points.shape}")
        if not np.isfinite(points).all():
            raise ValueError("PointCloud contains non-finite values")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @classmethod
    def from_xyz(cls, xyz: np.ndarray, intensity: Optional[np.ndarray] = None,
                 frame_pose: Optional[Pose] = None) -> "PointCloud":
        xyz = np.asarray(xyz, dtype=np.float64).reshape(-1, 3)
        if intensity is None:
            intensity = np.zeros(len(xyz))
        points = np.column_stack([xyz, np.asarray(intensity, dtype=np.float64).reshape(-1)])
        return cls(points, frame_pose or Pose.identity())

    @property
    def xyz(self) -> np.ndarray:
        return self.points[:, :3]

    @property
    def intensity(self) -> np.ndarray:
        return self.points[:, 3]

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointCloud):
            return NotImplemented
        return bool(np.array_equal(self.points, other.points)) and self.frame_pose == other.frame_pose

    __hash__ = None


def encode_pcf(pc: PointCloud) -> bytes:
    """Serialize points as PCF1 (the pose is not part of the format)"""
    body = pc.points.astype(_POINT_DTYPE).tobytes()
    return _PCF_HEADER.pack(PCF_MAGIC, len(pc)) + body


def decode_pcf(data: bytes, frame_pose: Optional[Pose] = None) -> PointCloud:
    """
    Parse a PCF1 byte sequence
    :param data: File contents
    :param frame_pose: Sensor pose to attach (identity when omitted)
    :return: PointCloud
    """
    if len(data) < _PCF_HEADER.size:
        raise TruncatedMessage(f"PCF1 header needs {_PCF_HEADER.size} bytes, got {len(data)}")
    magic, count = _PCF_HEADER.unpack_from(data, 0)
    if magic != PCF_MAGIC:
        raise UnsupportedFormat(f"Not a PCF1 file (magic {magic!r})")
    expected = _PCF_HEADER.size + count * 4 * _POINT_DTYPE.itemsize
    if len(data) < expected:
        raise TruncatedMessage(f"PCF1 declares {count} points but holds {len(data) - _PCF_HEADER.size} payload bytes")
    points = np.frombuffer(data, dtype=_POINT_DTYPE, count=count * 4, offset=_PCF_HEADER.size).reshape(-1, 4)
    return PointCloud(points, frame_pose or Pose.identity())


def write_pcf(pc: PointCloud, path: str) -> int:
    """Write a PCF1 file and return the number of bytes written"""
    data = encode_pcf(pc)
    with open(path, "wb") as f:
        f.write(data)
    return len(data)


def read_pcf(path: str, frame_pose: Optional[Pose] = None) -> PointCloud:
    with open(path, "rb") as f:
        return decode_pcf(f.read(), frame_pose)
