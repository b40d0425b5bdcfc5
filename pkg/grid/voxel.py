"""
Sparse Voxel Grids
Coordinate-format occupancy, voxelization and per-voxel features
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from core.log import get_logger
from .pointcloud import PointCloud
from .spec import GridSpec

logger = get_logger(__name__)


def linearize(coords: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    """
    x-major linear keys; sorting keys sorts coordinates lexicographically
    :param coords: (N, 3) integer coordinates inside dims
    :param dims: Grid dimensions
    :return: (N,) int64 keys
    """
    coords = np.asarray(coords, dtype=np.int64).reshape(-1, 3)
    return (coords[:, 0] * dims[1] + coords[:, 1]) * dims[2] + coords[:, 2]


def delinearize(keys: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.int64)
    z = keys % dims[2]
    rest = keys // dims[2]
    return np.column_stack([rest // dims[1], rest % dims[1], z]).astype(np.int64)


def check_coords(coords: np.ndarray, dims: Sequence[int]) -> None:
    """
    Raise ValueError unless coords are in bounds, unique and lexicographically sorted
    """
    if len(coords) == 0:
        return
    if (coords < 0).any() or (coords >= np.asarray(dims, dtype=np.int64)).any():
        raise ValueError(f"coordinates outside dims {tuple(dims)}")
    if (np.diff(linearize(coords, dims)) <= 0).any():
        raise ValueError("coordinates must be unique and sorted x-major")


def _frozen_coords(coords) -> np.ndarray:
    coords = np.array(coords, dtype=np.int64, copy=True)
    if coords.size == 0:
        coords = coords.reshape(0, 3)
    if coords.ndim != 2 or coords.shape[1] != 3:
        raise ValueError(f"coords must be an (N, 3) array, got {coords.shape}")
    coords.setflags(write=False)
    return coords


@dataclass(frozen=True, eq=False)
class SparseVoxelGrid:
    """Occupied voxels of a GridSpec, optionally with one feature row per voxel"""

    spec: GridSpec
    coords: np.ndarray
    features: Optional[np.ndarray] = None

    def __post_init__(self):
        coords = _frozen_coords(self.coords)
        check_coords(coords, self.spec.dims)
        object.__setattr__(self, "coords", coords)
        if self.features is not None:
            features = np.array(self.features, copy=True)
            if features.ndim != 2 or len(features) != len(coords):
                raise ValueError(f"features must have one row per coordinate, got {features.shape} for {len(coords)}")
            features.setflags(write=False)
            object.__setattr__(self, "features", features)

    @classmethod
    def empty(cls, spec: GridSpec) -> "SparseVoxelGrid":
        return cls(spec, np.zeros((0, 3), dtype=np.int64))

    @property
    def feature_dim(self) -> int:
        return 0 if self.features is None else self.features.shape[1]

    def keys(self) -> np.ndarray:
        return linearize(self.coords, self.spec.dims)

    def without_features(self) -> "SparseVoxelGrid":
        return SparseVoxelGrid(self.spec, self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseVoxelGrid):
            return NotImplemented
        if self.spec != other.spec or not np.array_equal(self.coords, other.coords):
            return False
        if self.features is None or other.features is None:
            return self.features is None and other.features is None
        return self.features.dtype == other.features.dtype and bool(np.array_equal(self.features, other.features))

    __hash__ = None


class VoxelStats(NamedTuple):
    points_in: int
    points_dropped: int
    voxels: int


def voxel_indices(xyz: np.ndarray, spec: GridSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Floor indices of every point and the mask of points inside the volume"""
    idx = np.floor((xyz - spec.origin) / spec.voxel_size)
    inside = ((idx >= 0) & (idx < np.asarray(spec.dims))).all(axis=1)
    return idx[inside].astype(np.int64), inside


def voxelize_with_stats(pc: PointCloud, spec: GridSpec) -> Tuple[SparseVoxelGrid, VoxelStats]:
    """
    Occupancy grid of a point cloud plus drop statistics
    :param pc: Points in the grid's frame
    :param spec: Target grid
    :return: (grid without features, stats)
    """
    idx, inside = voxel_indices(pc.xyz, spec)
    keys = np.unique(linearize(idx, spec.dims))
    grid = SparseVoxelGrid(spec, delinearize(keys, spec.dims))
    stats = VoxelStats(int(inside.sum()), int(len(pc) - inside.sum()), len(grid))
    if stats.points_dropped:
        logger.debug("voxelize %s: %d of %d points outside the volume", spec.level.label, stats.points_dropped, len(pc))
    return grid, stats


def voxelize(pc: PointCloud, spec: GridSpec) -> SparseVoxelGrid:
    """Voxels holding at least one point; out-of-volume points are dropped"""
    return voxelize_with_stats(pc, spec)[0]


def center_features(grid: SparseVoxelGrid) -> SparseVoxelGrid:
    """Attach voxel centres origin + (c + 0.5) * voxel_size as F=3 features"""
    spec = grid.spec
    centers = spec.origin + (grid.coords + 0.5) * spec.voxel_size
    return SparseVoxelGrid(spec, grid.coords, centers)


def mean_features(pc: PointCloud, spec: GridSpec) -> SparseVoxelGrid:
    """
    Occupancy grid with the mean (x, y, z, intensity) of each voxel's points (F=4)
    :param pc: Points in the grid's frame
    :param spec: Target grid
    :return: SparseVoxelGrid with features
    """
    idx, inside = voxel_indices(pc.xyz, spec)
    points = pc.points[inside]
    keys = linearize(idx, spec.dims)
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    unique_keys, starts, counts = np.unique(sorted_keys, return_index=True, return_counts=True)
    if len(unique_keys) == 0:
        return SparseVoxelGrid(spec, np.zeros((0, 3), dtype=np.int64), np.zeros((0, 4)))
    sums = np.add.reduceat(points[order], starts, axis=0)
    return SparseVoxelGrid(spec, delinearize(unique_keys, spec.dims), sums / counts[:, None])
