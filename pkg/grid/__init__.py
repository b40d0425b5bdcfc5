"""
Environment Representation
Poses, grid specs, point clouds and sparse voxel grids
"""

from .pose import Pose
from .spec import GridSpec, Level, canonical_specs, derive_dims
from .pointcloud import PointCloud, read_pcf, write_pcf, encode_pcf, decode_pcf
from .voxel import (
    SparseVoxelGrid,
    VoxelStats,
    voxelize,
    voxelize_with_stats,
    center_features,
    mean_features,
    linearize,
    delinearize,
)
from .ops import transform_points, regrid, merge_grids

__all__ = [
    "Pose",
    "GridSpec",
    "Level",
    "canonical_specs",
    "derive_dims",
    "PointCloud",
    "read_pcf",
    "write_pcf",
    "encode_pcf",
    "decode_pcf",
    "SparseVoxelGrid",
    "VoxelStats",
    "voxelize",
    "voxelize_with_stats",
    "center_features",
    "mean_features",
    "linearize",
    "delinearize",
    "transform_points",
    "regrid",
    "merge_grids",
]
