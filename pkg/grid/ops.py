"""
Grid Alignment
Moving point clouds and grids between vehicle frames, and merging grids
"""

from typing import Sequence

import numpy as np

from core.errors import SpecMismatch
from .pointcloud import PointCloud
from .pose import Pose
from .spec import GridSpec
from .voxel import SparseVoxelGrid, center_features, delinearize, linearize, voxel_indices


def transform_points(pc: PointCloud, relative: Pose) -> PointCloud:
    """
    Map every point by relative (rotation then translation); intensities are kept
    :param pc: Cloud in the source frame
    :param relative: Source-to-target transform
    :return: Cloud in the target frame
    """
    points = np.column_stack([relative.apply(pc.xyz), pc.intensity])
    return PointCloud(points, pc.frame_pose.compose(relative.inverse()))


def regrid(grid: SparseVoxelGrid, relative: Pose, target_spec: GridSpec) -> SparseVoxelGrid:
    """
    Re-express a grid in another frame and lattice: voxel centres are moved and re-voxelized
    :param grid: Source grid
    :param relative: Source-to-target transform
    :param target_spec: Target lattice
    :return: Coordinate grid; F=4 mean-feature grids also get the average of their moved
             mean points, grouped by the target voxel of each source centre
    """
    centers = center_features(grid.without_features()).features
    idx, inside = voxel_indices(relative.apply(centers), target_spec)
    keys = linearize(idx, target_spec.dims)
    if grid.feature_dim != 4:
        return SparseVoxelGrid(target_spec, delinearize(np.unique(keys), target_spec.dims))

    if not len(keys):
        return SparseVoxelGrid(target_spec, np.zeros((0, 3), dtype=np.int64), np.zeros((0, 4)))
    means = grid.features[inside].astype(np.float64)
    moved = np.column_stack([relative.apply(means[:, :3]), means[:, 3]])
    order = np.argsort(keys, kind="stable")
    unique_keys, starts, counts = np.unique(keys[order], return_index=True, return_counts=True)
    sums = np.add.reduceat(moved[order], starts, axis=0)
    return SparseVoxelGrid(target_spec, delinearize(unique_keys, target_spec.dims), sums / counts[:, None])


def merge_grids(grids: Sequence[SparseVoxelGrid]) -> SparseVoxelGrid:
    """
    Union of grids on one spec; shared voxels keep the element-wise maximum feature
    :param grids: Grids with identical spec and feature layout
    :return: Merged grid
    """
    if not grids:
        raise SpecMismatch("merge_grids needs at least one grid")
    spec = grids[0].spec
    feature_dim = grids[0].feature_dim
    for other in grids[1:]:
        if other.spec != spec:
            raise SpecMismatch(f"cannot merge {other.spec!r} into {spec!r}")
        if other.feature_dim != feature_dim:
            raise SpecMismatch(f"cannot merge F={other.feature_dim} grid into F={feature_dim} grids")

    keys = np.concatenate([g.keys() for g in grids])
    if not feature_dim:
        return SparseVoxelGrid(spec, delinearize(np.unique(keys), spec.dims))

    features = np.concatenate([g.features for g in grids])
    order = np.argsort(keys, kind="stable")
    unique_keys, starts = np.unique(keys[order], return_index=True)
    merged = np.maximum.reduceat(features[order], starts, axis=0) if len(order) else features
    return SparseVoxelGrid(spec, delinearize(unique_keys, spec.dims), merged)
