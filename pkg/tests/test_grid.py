import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.config import Config
from core.errors import DimensionMismatch, SpecMismatch, TruncatedMessage, UnsupportedFormat
from grid import (
    GridSpec,
    Level,
    PointCloud,
    Pose,
    SparseVoxelGrid,
    canonical_specs,
    center_features,
    decode_pcf,
    encode_pcf,
    derive_dims,
    mean_features,
    merge_grids,
    read_pcf,
    regrid,
    transform_points,
    voxelize,
    voxelize_with_stats,
    write_pcf,
)
from .conftest import random_cloud


def floor_oracle(pc, spec):
    """Floor every point on its own and deduplicate through a set"""
    occupied = set()
    for x, y, z in pc.xyz:
        idx = tuple(int(v) for v in np.floor((np.array([x, y, z]) - spec.origin) / spec.voxel_size))
        if all(0 <= idx[d] < spec.dims[d] for d in range(3)):
            occupied.add(idx)
    return sorted(occupied)


@pytest.mark.parametrize("extent, voxel_size, dims", [
    ((280, 80, 4), (0.05, 0.05, 0.10), (5600, 1600, 40)),
    ((280, 80, 4), (0.10, 0.10, 0.20), (2800, 800, 20)),
    ((280, 80, 4), (0.20, 0.20, 0.40), (1400, 400, 10)),
    ((1, 1, 1), (1, 1, 1), (1, 1, 1)),
    (Config.REDUCED_EXTENT, (0.20, 0.20, 0.40), (80, 24, 10)),
])
def test_derive_dims(extent, voxel_size, dims):
    assert derive_dims(extent, voxel_size) == dims


def test_derive_dims_rejects_non_multiple():
    with pytest.raises(DimensionMismatch):
        derive_dims((17.5, 5.0, 4.0), (0.2, 0.2, 0.4))


def test_canonical_specs():
    specs = canonical_specs()
    assert specs[Level.HIGH].dims == (5600, 1600, 40)
    assert specs[Level.MEDIUM].dims == (2800, 800, 20)
    assert specs[Level.LOW].dims == (1400, 400, 10)
    assert np.allclose(specs[Level.LOW].voxel_size, (0.2, 0.2, 0.4))
    assert all(spec.level == level for level, spec in specs.items())


def test_grid_rejects_unsorted_or_duplicate_coords(unit_spec):
    with pytest.raises(ValueError):
        SparseVoxelGrid(unit_spec, [[1, 0, 0], [0, 0, 0]])
    with pytest.raises(ValueError):
        SparseVoxelGrid(unit_spec, [[0, 0, 0], [0, 0, 0]])
    with pytest.raises(ValueError):
        SparseVoxelGrid(unit_spec, [[20, 0, 0]])


def test_point_cloud_rejects_nan():
    with pytest.raises(ValueError):
        PointCloud(np.array([[0.0, np.nan, 0.0, 0.0]]))


def test_voxelize_empty_cloud(unit_spec):
    grid = voxelize(PointCloud(np.zeros((0, 4))), unit_spec)
    assert len(grid) == 0
    assert grid.features is None


def test_voxelize_single_point(unit_spec):
    grid = voxelize(PointCloud.from_xyz([[0.01, 0.01, 0.01]]), unit_spec)
    assert grid.coords.tolist() == [[0, 0, 0]]


def test_voxelize_matches_floor_oracle(rng):
    spec = GridSpec((0.0, 0.0, 0.0), (0.05, 0.05, 0.10), (20, 20, 10), Level.HIGH)
    pc = PointCloud.from_xyz(rng.uniform(0.0, 1.0, (1000, 3)))
    assert voxelize(pc, spec).coords.tolist() == [list(c) for c in floor_oracle(pc, spec)]


def test_voxelize_drops_points_outside_and_counts_them(unit_spec):
    pc = PointCloud.from_xyz([[0.01, 0.01, 0.01], [-0.01, 0.0, 0.0], [1.5, 0.0, 0.0], [0.5, 0.5, 0.5]])
    grid, stats = voxelize_with_stats(pc, unit_spec)
    assert stats.points_in == 2
    assert stats.points_dropped == 2
    assert stats.voxels == len(grid) == 2


def test_voxel_count_never_exceeds_point_count(rng, test_specs):
    pc = random_cloud(rng, 500, margin=1.0)
    for spec in test_specs.values():
        assert len(voxelize(pc, spec)) <= len(pc)


def test_center_features_half_voxel(unit_spec):
    grid = center_features(SparseVoxelGrid(unit_spec, [[0, 0, 0]]))
    assert np.allclose(grid.features, [[0.025, 0.025, 0.05]], atol=1e-8)


def test_center_features_far_corner():
    spec = GridSpec.canonical(Level.HIGH)
    grid = center_features(SparseVoxelGrid(spec, [[5599, 1599, 39]]))
    assert np.allclose(grid.features, [[139.975, 39.975, 0.95]], atol=1e-4)


def test_centers_lie_inside_their_voxel(rng, test_specs):
    for spec in test_specs.values():
        grid = center_features(voxelize(random_cloud(rng, 400), spec))
        lower = spec.origin + grid.coords * spec.voxel_size
        upper = spec.origin + (grid.coords + 1) * spec.voxel_size
        assert ((grid.features >= lower) & (grid.features < upper)).all()


def test_revoxelizing_centers_is_idempotent(rng, test_specs):
    pc = random_cloud(rng, 800)
    for spec in test_specs.values():
        grid = voxelize(pc, spec)
        again = voxelize(PointCloud.from_xyz(center_features(grid).features), spec)
        assert np.array_equal(again.coords, grid.coords)


def test_mean_features_singletons_equal_points(unit_spec):
    points = np.array([[0.01, 0.01, 0.01, 0.3], [0.51, 0.21, 0.31, 0.9]])
    grid = mean_features(PointCloud(points), unit_spec)
    assert np.allclose(grid.features, points)


def test_mean_features_two_points_in_one_voxel(unit_spec):
    grid = mean_features(PointCloud(np.array([[0.01, 0.0, 0.0, 0.2], [0.03, 0.0, 0.0, 0.4]])), unit_spec)
    assert grid.coords.tolist() == [[0, 0, 0]]
    assert np.allclose(grid.features, [[0.02, 0.0, 0.0, 0.3]])


def test_mean_features_match_group_by_oracle(rng, test_specs):
    spec = test_specs[Level.LOW]
    pc = random_cloud(rng, 2000)
    groups = {}
    for point in pc.points:
        idx = tuple(int(v) for v in np.floor((point[:3] - spec.origin) / spec.voxel_size))
        if all(0 <= idx[d] < spec.dims[d] for d in range(3)):
            groups.setdefault(idx, []).append(point)
    grid = mean_features(pc, spec)
    assert [tuple(c) for c in grid.coords] == sorted(groups)
    expected = np.array([np.mean(groups[k], axis=0) for k in sorted(groups)])
    assert np.allclose(grid.features, expected, atol=1e-6)


def test_transform_identity_and_translation():
    pc = PointCloud(np.array([[0.0, 0.0, 0.0, 0.7]]))
    assert np.array_equal(transform_points(pc, Pose.identity()).points, pc.points)
    moved = transform_points(pc, Pose(np.eye(3), [1.0, 0.0, 0.0]))
    assert np.array_equal(moved.points, [[1.0, 0.0, 0.0, 0.7]])


def test_transform_then_inverse_restores_points(rng):
    pc = random_cloud(rng, 100)
    pose = Pose.from_euler(0.1, -0.2, 1.3, (5.0, -3.0, 0.5))
    back = transform_points(transform_points(pc, pose), pose.inverse())
    assert np.allclose(back.points, pc.points, atol=1e-9)
    assert np.array_equal(back.intensity, pc.intensity)


def test_regrid_identity_keeps_coords(rng, test_specs):
    spec = test_specs[Level.HIGH]
    grid = voxelize(random_cloud(rng, 500), spec)
    assert np.array_equal(regrid(grid, Pose.identity(), spec).coords, grid.coords)


def test_regrid_one_voxel_shift(rng, test_specs):
    spec = test_specs[Level.MEDIUM]
    grid = voxelize(random_cloud(rng, 500), spec)
    shifted = regrid(grid, Pose(np.eye(3), [spec.voxel_size[0], 0.0, 0.0]), spec)
    expected = grid.coords + [1, 0, 0]
    expected = expected[expected[:, 0] < spec.dims[0]]
    assert np.array_equal(shifted.coords, expected)


def test_regrid_equals_transform_then_voxelize(rng, test_specs):
    source, target = test_specs[Level.HIGH], test_specs[Level.LOW]
    grid = voxelize(random_cloud(rng, 600), source)
    pose = Pose.from_euler(0.0, 0.05, 0.7, (0.4, -0.3, 0.1))
    centers = PointCloud.from_xyz(center_features(grid).features)
    expected = voxelize(transform_points(centers, pose), target)
    assert regrid(grid, pose, target) == expected


def test_regrid_mean_grid_reaverages_mean_points(rng, test_specs):
    spec = test_specs[Level.LOW]
    grid = mean_features(random_cloud(rng, 600), spec)
    out = regrid(grid, Pose.identity(), spec)
    assert out.feature_dim == 4
    assert np.array_equal(out.coords, grid.coords)
    assert np.allclose(out.features, grid.features)


def test_regrid_mean_grid_takes_occupancy_from_centres(rng, test_specs):
    source, target = test_specs[Level.HIGH], test_specs[Level.LOW]
    grid = mean_features(random_cloud(rng, 600), source)
    pose = Pose.from_euler(0.0, 0.05, 0.7, (0.4, -0.3, 0.1))
    out = regrid(grid, pose, target)

    centers = PointCloud.from_xyz(pose.apply(center_features(grid.without_features()).features))
    assert out.coords.tolist() == [list(c) for c in floor_oracle(centers, target)]
    assert np.array_equal(out.coords, regrid(grid.without_features(), pose, target).coords)

    groups = {}
    for center, mean in zip(centers.xyz, grid.features):
        idx = tuple(int(v) for v in np.floor((center - target.origin) / target.voxel_size))
        if all(0 <= idx[d] < target.dims[d] for d in range(3)):
            moved = np.append(pose.apply(mean[:3])[0], mean[3])
            groups.setdefault(idx, []).append(moved)
    expected = np.array([np.mean(groups[tuple(c)], axis=0) for c in out.coords.tolist()])
    assert np.allclose(out.features, expected, atol=1e-9)


def test_regrid_empty_mean_grid(test_specs):
    spec = test_specs[Level.LOW]
    empty = SparseVoxelGrid(spec, np.zeros((0, 3), dtype=np.int64), np.zeros((0, 4)))
    out = regrid(empty, Pose.from_euler(0.0, 0.0, 0.3, (1.0, 0.0, 0.0)), spec)
    assert len(out) == 0
    assert out.feature_dim == 4


def test_merge_is_idempotent(rng, test_specs):
    grid = center_features(voxelize(random_cloud(rng, 300), test_specs[Level.LOW]))
    assert merge_grids([grid, grid]) == grid


def test_merge_disjoint_grids(unit_spec):
    a = SparseVoxelGrid(unit_spec, [[0, 0, 0], [5, 0, 0]])
    b = SparseVoxelGrid(unit_spec, [[1, 2, 3]])
    assert merge_grids([a, b]).coords.tolist() == [[0, 0, 0], [1, 2, 3], [5, 0, 0]]


def test_merge_rejects_spec_mismatch(test_specs):
    with pytest.raises(SpecMismatch):
        merge_grids([SparseVoxelGrid.empty(test_specs[Level.HIGH]), SparseVoxelGrid.empty(test_specs[Level.LOW])])
    with pytest.raises(SpecMismatch):
        merge_grids([])


@given(st.lists(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4), st.integers(-5, 5)),
                         max_size=12), min_size=1, max_size=4))
@settings(max_examples=150)
def test_merge_matches_map_union_oracle(entries):
    spec = GridSpec((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (5, 5, 5))
    grids, union = [], {}
    for rows in entries:
        cells = {}
        for x, y, z, value in rows:
            cells[(x, y, z)] = float(value)
        keys = sorted(cells)
        grids.append(SparseVoxelGrid(spec, np.array(keys, dtype=np.int64).reshape(-1, 3),
                                     np.array([[cells[k]] for k in keys]).reshape(-1, 1)))
        for k, v in cells.items():
            union[k] = max(union.get(k, v), v)
    merged = merge_grids(grids)
    assert [tuple(c) for c in merged.coords] == sorted(union)
    assert merged.features[:, 0].tolist() == [union[k] for k in sorted(union)]
    assert merge_grids(grids[::-1]) == merged


def test_pcf_file_round_trip(tmp_path, rng):
    pc = PointCloud(random_cloud(rng, 200).points.astype(np.float32))
    path = str(tmp_path / "cloud.pcf")
    assert write_pcf(pc, path) == 8 + 200 * 16
    assert read_pcf(path) == pc


def test_pcf_rejects_bad_input():
    data = encode_pcf(PointCloud.from_xyz([[1.0, 2.0, 3.0]]))
    with pytest.raises(TruncatedMessage):
        decode_pcf(data[:-1])
    with pytest.raises(UnsupportedFormat):
        decode_pcf(b"XXXX" + data[4:])
    with pytest.raises(TruncatedMessage):
        decode_pcf(b"PC")
