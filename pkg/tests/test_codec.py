import struct

import numpy as np
import pytest

from codec import CodecMode, HEADER_SIZE, Sublayout, decode, encode, make_message, message_size
from core import golden
from core.errors import CodecError, CorruptPayload, EncodingOverflow, TruncatedMessage, UnsupportedFormat
from core.golden import golden_cloud
from grid import GridSpec, Level, Pose, SparseVoxelGrid, delinearize, mean_features, voxelize
from .conftest import golden_path, random_cloud


@pytest.fixture
def small_spec():
    return GridSpec((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (4, 4, 4), Level.LOW)


def test_header_layout_by_hand(small_spec):
    m = make_message(3, 5, Pose.identity(), SparseVoxelGrid(small_spec, [[1, 2, 3]]))
    expected = (
        b"SVG1" + b"\x01" + b"\x00"
        + struct.pack("<I", 3) + struct.pack("<Q", 5)
        + struct.pack("<12f", 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0)
        + b"\x02"
        + struct.pack("<3f", 0, 0, 0) + struct.pack("<3f", 1, 1, 1)
        + struct.pack("<3I", 4, 4, 4) + struct.pack("<I", 1)
        + struct.pack("<3I", 1, 2, 3)
    )
    assert encode(m) == expected
    assert len(expected) == HEADER_SIZE + 12


def test_packed_sublayout_sets_flag(small_spec):
    m = make_message(3, 5, Pose.identity(), SparseVoxelGrid(small_spec, [[1, 2, 3]]))
    data = encode(m, sublayout=Sublayout.PACKED)
    assert data[5] == 0x80
    assert data[HEADER_SIZE:] == struct.pack("<3H", 1, 2, 3)
    assert decode(data) == m


def test_empty_grid_is_header_only(small_spec):
    data = encode(make_message(0, 0, Pose.identity(), SparseVoxelGrid.empty(small_spec)))
    assert len(data) == HEADER_SIZE == message_size(0)
    assert len(decode(data).payload) == 0


def _random_message(rng):
    dims = tuple(int(d) for d in rng.integers(1, 40, 3))
    spec = GridSpec(rng.uniform(-50, 50, 3), rng.uniform(0.01, 1.0, 3), dims, Level(int(rng.integers(0, 3))))
    total = dims[0] * dims[1] * dims[2]
    keys = np.unique(rng.integers(0, total, int(rng.integers(0, min(total, 64) + 1))))
    coords = delinearize(keys, dims)
    mode = CodecMode(int(rng.integers(0, 2)))
    features = rng.uniform(-10, 10, (len(coords), 4)) if mode == CodecMode.COORDS_PLUS_MEAN else None
    pose = Pose.from_euler(*rng.uniform(-np.pi, np.pi, 3), rng.uniform(-100, 100, 3))
    grid = SparseVoxelGrid(spec, coords, features)
    m = make_message(int(rng.integers(0, 2 ** 32)), int(rng.integers(0, 2 ** 62)), pose, grid, mode)
    return m, mode, Sublayout(int(rng.integers(0, 2)))


def test_round_trip_seeded_messages():
    rng = np.random.default_rng(2024)
    for _ in range(10_000):
        m, mode, sublayout = _random_message(rng)
        data = encode(m, mode, sublayout)
        assert len(data) == message_size(m.voxel_count, mode, sublayout)
        assert decode(data) == m


def test_mean_mode_round_trip(rng, test_specs):
    grid = mean_features(random_cloud(rng, 300), test_specs[Level.MEDIUM])
    m = make_message(9, 100, Pose.from_euler(0, 0, 0.3, (1, 2, 0)), grid, CodecMode.COORDS_PLUS_MEAN)
    decoded = decode(encode(m, CodecMode.COORDS_PLUS_MEAN))
    assert decoded == m
    assert np.allclose(decoded.payload.features, grid.features, atol=1e-5)


def test_mean_mode_needs_features(small_spec):
    with pytest.raises(ValueError):
        make_message(0, 0, Pose.identity(), SparseVoxelGrid(small_spec, [[0, 0, 0]]), CodecMode.COORDS_PLUS_MEAN)


def test_coordinate_mode_refuses_to_drop_features(small_spec):
    grid = SparseVoxelGrid(small_spec, [[0, 1, 2]], np.array([[0.5, 1.5, 2.5, 0.25]], dtype="<f4"))
    m = make_message(4, 0, Pose.identity(), grid, CodecMode.COORDS_PLUS_MEAN)
    with pytest.raises(CodecError):
        encode(m, CodecMode.COORDS_ONLY)
    assert decode(encode(m, CodecMode.COORDS_PLUS_MEAN)) == m


def test_decode_rejects_truncation(small_spec):
    data = encode(make_message(1, 1, Pose.identity(), SparseVoxelGrid(small_spec, [[0, 0, 0], [3, 3, 3]])))
    for cut in (0, 3, 5, HEADER_SIZE - 1, HEADER_SIZE, len(data) - 1):
        with pytest.raises(TruncatedMessage):
            decode(data[:cut])


def test_decode_rejects_bad_prefix(small_spec):
    data = encode(make_message(1, 1, Pose.identity(), SparseVoxelGrid.empty(small_spec)))
    with pytest.raises(UnsupportedFormat):
        decode(b"SVG2" + data[4:])
    with pytest.raises(UnsupportedFormat):
        decode(data[:4] + b"\x02" + data[5:])
    with pytest.raises(UnsupportedFormat):
        decode(data[:5] + b"\x05" + data[6:])


def test_decode_rejects_trailing_bytes(small_spec):
    data = encode(make_message(1, 1, Pose.identity(), SparseVoxelGrid(small_spec, [[0, 0, 0]])))
    with pytest.raises(CorruptPayload):
        decode(data + b"\x00")


def test_decode_rejects_out_of_range_and_unsorted_coords(small_spec):
    data = encode(make_message(1, 1, Pose.identity(), SparseVoxelGrid(small_spec, [[0, 0, 0], [1, 0, 0]])))
    out_of_range = data[:HEADER_SIZE] + struct.pack("<6I", 0, 0, 0, 4, 0, 0)
    unsorted = data[:HEADER_SIZE] + struct.pack("<6I", 1, 0, 0, 0, 0, 0)
    for bad in (out_of_range, unsorted):
        with pytest.raises(CorruptPayload):
            decode(bad)


def test_decode_rejects_broken_pose(small_spec):
    data = bytearray(encode(make_message(1, 1, Pose.identity(), SparseVoxelGrid.empty(small_spec))))
    struct.pack_into("<f", data, 18, 2.0)
    with pytest.raises(CorruptPayload):
        decode(bytes(data))


def test_packed_overflow():
    spec = GridSpec((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (70_000, 1, 1))
    m = make_message(0, 0, Pose.identity(), SparseVoxelGrid(spec, [[69_999, 0, 0]]))
    with pytest.raises(EncodingOverflow):
        encode(m, sublayout=Sublayout.PACKED)
    assert decode(encode(m)) == m


def test_packed_accepts_canonical_high_grid():
    spec = GridSpec.canonical(Level.HIGH)
    m = make_message(0, 0, Pose.identity(), SparseVoxelGrid(spec, [[5599, 1599, 39]]))
    assert decode(encode(m, sublayout=Sublayout.PACKED)) == m


def test_low_level_message_matches_golden():
    with open(golden_path("cloud_seed7_low.svg"), "rb") as f:
        expected = f.read()
    grid = voxelize(golden_cloud(), GridSpec.canonical(Level.LOW))
    assert encode(make_message(0, 0, Pose.identity(), grid)) == expected


@pytest.mark.parametrize("name, mode, size", [
    ("handmade_low_compat.svg", CodecMode.COORDS_ONLY, HEADER_SIZE + 3 * 12),
    ("handmade_low_packed.svg", CodecMode.COORDS_ONLY, HEADER_SIZE + 3 * 6),
    ("handmade_low_mean.svg", CodecMode.COORDS_PLUS_MEAN, HEADER_SIZE + 3 * 28),
])
def test_committed_messages_are_byte_stable(name, mode, size):
    with open(golden_path(name), "rb") as f:
        committed = f.read()
    assert len(committed) == size
    assert golden.HANDMADE_ARTIFACTS[name]() == committed
    m = decode(committed)
    assert m == golden.handmade_message(mode)
    assert m.sender_id == 7 and m.timestamp == 1_000_000
    assert m.payload.coords.tolist() == [[0, 0, 0], [700, 200, 5], [1399, 399, 9]]
    if mode == CodecMode.COORDS_PLUS_MEAN:
        assert m.payload.features.tolist() == [list(row) for row in golden.HANDMADE_MEANS]
