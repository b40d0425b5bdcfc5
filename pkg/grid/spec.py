"""
Grid Specifications
Resolution levels, dimension derivation and the canonical per-level grids
"""

from dataclasses import dataclass
from enum import IntEnum
from typing import Dict, Sequence, Tuple

import numpy as np

from core.config import Config
from core.errors import DimensionMismatch

DIVISIBILITY_TOLERANCE = 1e-9


class Level(IntEnum):
    """Resolution level; each step doubles the voxel pitch"""

    HIGH = 0
    MEDIUM = 1
    LOW = 2

    @property
    def label(self) -> str:
        return self.name.lower()

    @property
    def scale(self) -> int:
        return 2 ** int(self)

    @classmethod
    def from_name(cls, name: str) -> "Level":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(f"Unknown level '{name}' (expected high, medium or low)") from None


def derive_dims(extent: Sequence[float], voxel_size: Sequence[float]) -> Tuple[int, int, int]:
    """
    Voxel counts per axis for a volume
    :param extent: Volume size in meters
    :param voxel_size: Voxel pitch in meters
    :return: extent / voxel_size, rounded
    """
    extent = np.asarray(extent, dtype=np.float64)
    voxel_size = np.asarray(voxel_size, dtype=np.float64)
    if extent.shape != (3,) or voxel_size.shape != (3,):
        raise ValueError("extent and voxel_size must be 3-vectors")
    if (extent <= 0).any() or (voxel_size <= 0).any():
        raise ValueError(f"extent and voxel_size must be positive, got {extent} / {voxel_size}")
    ratio = extent / voxel_size
    dims = np.rint(ratio)
    if (np.abs(ratio - dims) > DIVISIBILITY_TOLERANCE * ratio).any() or (dims < 1).any():
        raise DimensionMismatch(f"extent {tuple(extent)} is not a multiple of voxel size {tuple(voxel_size)}")
    return tuple(int(d) for d in dims)


def _f32_vector(values: Sequence[float]) -> np.ndarray:
    # stored at float32 precision, the width the wire format carries
    array = np.asarray(values, dtype=np.float32).astype(np.float64).reshape(-1)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Axis-aligned voxel lattice: origin is the minimum corner"""

    origin: np.ndarray
    voxel_size: np.ndarray
    dims: Tuple[int, int, int]
    level: Level = Level.HIGH

    def __post_init__(self):
        origin = _f32_vector(self.origin)
        voxel_size = _f32_vector(self.voxel_size)
        dims = tuple(int(d) for d in self.dims)
        if origin.shape != (3,) or voxel_size.shape != (3,) or len(dims) != 3:
            raise ValueError("GridSpec needs 3-vectors for origin, voxel_size and dims")
        if not (np.isfinite(origin).all() and np.isfinite(voxel_size).all()):
            raise ValueError("GridSpec contains non-finite values")
        if (voxel_size <= 0).any():
            raise ValueError(f"voxel_size must be positive, got {voxel_size}")
        if min(dims) < 1:
            raise ValueError(f"dims must be positive, got {dims}")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "voxel_size", voxel_size)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "level", Level(self.level))

    @classmethod
    def canonical(cls, level: Level, extent: Sequence[float] = Config.GRID_EXTENT,
                  origin: Sequence[float] = Config.GRID_ORIGIN) -> "GridSpec":
        """
        Level grid over a volume
        :param level: Resolution level
        :param extent: Volume size in meters
        :param origin: Minimum corner in meters (ego frame)
        :return: GridSpec
        """
        level = Level(level)
        voxel_size = tuple(v * level.scale for v in Config.HIGH_VOXEL_SIZE)
        return cls(np.asarray(origin), np.asarray(voxel_size), derive_dims(extent, voxel_size), level)

    @property
    def voxel_count(self) -> int:
        return self.dims[0] * self.dims[1] * self.dims[2]

    @property
    def extent(self) -> np.ndarray:
        return np.asarray(self.dims, dtype=np.float64) * self.voxel_size

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridSpec):
            return NotImplemented
        return (
            self.dims == other.dims
            and self.level == other.level
            and np.array_equal(self.origin, other.origin)
            and np.array_equal(self.voxel_size, other.voxel_size)
        )

    def __hash__(self):
        return hash((self.origin.tobytes(), self.voxel_size.tobytes(), self.dims, int(self.level)))

    def __repr__(self) -> str:
        return (
            f"GridSpec(level={self.level.label}, origin={tuple(self.origin.round(6))}, "
            f"voxel_size={tuple(self.voxel_size.round(6))}, dims={self.dims})"
        )


def canonical_specs(extent: Sequence[float] = Config.GRID_EXTENT,
                    origin: Sequence[float] = Config.GRID_ORIGIN) -> Dict[Level, GridSpec]:
    """All three level grids over the same volume"""
    return {level: GridSpec.canonical(level, extent, origin) for level in Level}
