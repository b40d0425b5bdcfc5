"""
Sparse Tensors
Active-site coordinates + per-site feature rows over a 3D spatial shape
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from core.errors import ShapeError
from grid import SparseVoxelGrid, linearize
from grid.voxel import check_coords

FEATURE_DTYPE = np.float64


@dataclass(frozen=True, eq=False)
class SparseTensor:
    """coords are sorted x-major and unique; features has one row per active site"""

    shape: Tuple[int, int, int]
    coords: np.ndarray
    features: np.ndarray

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        if len(shape) != 3 or min(shape) < 1:
            raise ShapeError(f"spatial shape must be three positive extents, got {self.shape}")
        coords = np.array(self.coords, dtype=np.int64, copy=True).reshape(-1, 3)
        features = np.array(self.features, dtype=FEATURE_DTYPE, copy=True)
        if features.ndim != 2 or len(features) != len(coords):
            raise ShapeError(f"features {features.shape} do not match {len(coords)} active sites")
        try:
            check_coords(coords, shape)
        except ValueError as e:
            raise ShapeError(str(e)) from None
        coords.setflags(write=False)
        features.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "features", features)

    @classmethod
    def empty(cls, shape, channels: int) -> "SparseTensor":
        return cls(shape, np.zeros((0, 3), dtype=np.int64), np.zeros((0, channels)))

    @classmethod
    def from_grid(cls, grid: SparseVoxelGrid) -> "SparseTensor":
        """Grid voxels as active sites; the grid must carry features"""
        if grid.features is None:
            raise ShapeError("grid has no features to feed a sparse tensor")
        return cls(grid.spec.dims, grid.coords, grid.features)

    @property
    def channels(self) -> int:
        return self.features.shape[1]

    def keys(self) -> np.ndarray:
        return linearize(self.coords, self.shape)

    def with_features(self, features: np.ndarray) -> "SparseTensor":
        """Same active set, new feature rows"""
        return SparseTensor(self.shape, self.coords, features)

    def __len__(self) -> int:
        return len(self.coords)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseTensor):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.coords, other.coords)
            and self.features.shape == other.features.shape
            and bool(np.array_equal(self.features, other.features))
        )

    __hash__ = None
