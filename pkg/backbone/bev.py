"""
Bird's-Eye-View Mapping
Dense 2D feature maps from the fused sparse tensor, plus the BEV1 dump format
"""

import struct
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from core.errors import ShapeError, TruncatedMessage, UnsupportedFormat
from grid import GridSpec
from sparse import SparseTensor

BEV_MAGIC = b"BEV1"
_BEV_HEADER = struct.Struct("<4sIII")
BEV_DTYPE = np.dtype("<f4")


@dataclass(frozen=True, eq=False)
class BevMap:
    """features is (width, height, z_levels * fused_channels), channel index z * C + c"""

    features: np.ndarray
    z_levels: int
    spec: Optional[GridSpec] = None
    seed: Optional[int] = None

    @property
    def width(self) -> int:
        return self.features.shape[0]

    @property
    def height(self) -> int:
        return self.features.shape[1]

    @property
    def channels(self) -> int:
        return self.features.shape[2]

    @property
    def fused_channels(self) -> int:
        return self.channels // self.z_levels

    def __eq__(self, other) -> bool:
        if not isinstance(other, BevMap):
            return NotImplemented
        return self.z_levels == other.z_levels and bool(np.array_equal(self.features, other.features))

    __hash__ = None


def to_bev(t: SparseTensor, expected_shape: Optional[Tuple[int, int, int]] = None,
           expected_channels: Optional[int] = None, spec: Optional[GridSpec] = None,
           seed: Optional[int] = None) -> BevMap:
    """
    Densify and stack z-slices along the channel axis
    :param t: Fused final tensor
    :param expected_shape: Required spatial shape, e.g. (700, 200, 5)
    :param expected_channels: Required channel count, e.g. 128
    :param spec: Provenance: the high-resolution input grid
    :param seed: Provenance: weights seed
    :return: BevMap
    """
    if expected_shape is not None and tuple(t.shape) != tuple(expected_shape):
        raise ShapeError(f"BEV mapping expects spatial shape {tuple(expected_shape)}, got {t.shape}")
    if expected_channels is not None and t.channels != expected_channels:
        raise ShapeError(f"BEV mapping expects {expected_channels} channels, got {t.channels}")
    width, height, depth = t.shape
    channels = t.channels
    dense = np.zeros((width, height, depth, channels), dtype=BEV_DTYPE)
    if len(t):
        dense[t.coords[:, 0], t.coords[:, 1], t.coords[:, 2]] = t.features
    return BevMap(dense.reshape(width, height, depth * channels), depth, spec, seed)


def encode_bev(bev: BevMap) -> bytes:
    header = _BEV_HEADER.pack(BEV_MAGIC, bev.width, bev.height, bev.channels)
    return header + np.ascontiguousarray(bev.features, dtype=BEV_DTYPE).tobytes()


def write_bev(bev: BevMap, path: str) -> int:
    """Flat little-endian f32 dump after a (magic, width, height, channels) header"""
    data = encode_bev(bev)
    with open(path, "wb") as f:
        f.write(data)
    return len(data)


def read_bev(path: str, z_levels: int = 1) -> BevMap:
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < _BEV_HEADER.size:
        raise TruncatedMessage(f"BEV1 header needs {_BEV_HEADER.size} bytes")
    magic, width, height, channels = _BEV_HEADER.unpack_from(data, 0)
    if magic != BEV_MAGIC:
        raise UnsupportedFormat(f"Not a BEV1 file (magic {magic!r})")
    count = width * height * channels
    if len(data) < _BEV_HEADER.size + count * BEV_DTYPE.itemsize:
        raise TruncatedMessage(f"BEV1 declares {width}x{height}x{channels} values")
    values = np.frombuffer(data, dtype=BEV_DTYPE, count=count, offset=_BEV_HEADER.size)
    return BevMap(values.reshape(width, height, channels).copy(), z_levels)
