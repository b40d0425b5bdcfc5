"""
SVG1 Wire Format
Little-endian, bit-exact encoding of VoxelGridMessage
"""

import struct

import numpy as np

from core.errors import CodecError, CorruptPayload, EncodingOverflow, TruncatedMessage, UnsupportedFormat
from grid import GridSpec, Level, Pose, SparseVoxelGrid
from grid.voxel import check_coords
from .message import CodecMode, Sublayout, VoxelGridMessage
from .sizes import COORD_BYTES, HEADER_SIZE, MEAN_FEATURE_BYTES

MAGIC = b"SVG1"
VERSION = 1
PACKED_FLAG = 0x80
_MODE_MASK = 0x7F

_HEADER = struct.Struct("<4sBBIQ12fB3f3f3II")
assert _HEADER.size == HEADER_SIZE

_COORD_DTYPES = {Sublayout.COMPAT: np.dtype("<u4"), Sublayout.PACKED: np.dtype("<u2")}
_FEATURE_DTYPE = np.dtype("<f4")


def encode(m: VoxelGridMessage, mode: CodecMode = CodecMode.COORDS_ONLY,
           sublayout: Sublayout = Sublayout.COMPAT) -> bytes:
    """
    Serialize a message
    :param m: Message to encode
    :param mode: COORDS_PLUS_MEAN appends the F=4 feature rows
    :param sublayout: Coordinate record width
    :return: Encoded bytes
    """
    mode, sublayout = CodecMode(mode), Sublayout(sublayout)
    spec, grid = m.spec, m.payload
    if mode == CodecMode.COORDS_PLUS_MEAN and grid.feature_dim != 4:
        raise CodecError(f"mean-feature mode needs F=4 features, payload has F={grid.feature_dim}")
    if mode == CodecMode.COORDS_ONLY and grid.feature_dim:
        raise CodecError(f"coordinate mode would drop the payload's F={grid.feature_dim} features")
    if m.sender_id > 0xFFFFFFFF:
        raise EncodingOverflow(f"sender_id {m.sender_id} exceeds u32")
    if m.timestamp > 0xFFFFFFFFFFFFFFFF:
        raise EncodingOverflow(f"timestamp {m.timestamp} exceeds u64")
    if max(spec.dims) > 0xFFFFFFFF or len(grid) > 0xFFFFFFFF:
        raise EncodingOverflow("dims or voxel count exceed u32")
    if sublayout == Sublayout.PACKED and max(spec.dims) - 1 > 0xFFFF:
        raise EncodingOverflow(f"dims {spec.dims} do not fit the packed u16 sublayout")

    mode_byte = int(mode) | (PACKED_FLAG if sublayout == Sublayout.PACKED else 0)
    header = _HEADER.pack(
        MAGIC, VERSION, mode_byte, m.sender_id, m.timestamp,
        *m.sender_pose.to_wire(),
        int(spec.level), *spec.origin, *spec.voxel_size, *spec.dims,
        len(grid),
    )
    parts = [header, grid.coords.astype(_COORD_DTYPES[sublayout]).tobytes()]
    if mode == CodecMode.COORDS_PLUS_MEAN:
        parts.append(grid.features.astype(_FEATURE_DTYPE).tobytes())
    return b"".join(parts)


def _check_prefix(data: bytes) -> None:
    if len(data) < 6:
        raise TruncatedMessage(f"message too short for magic and version ({len(data)} bytes)")
    if data[:4] != MAGIC:
        raise UnsupportedFormat(f"bad magic {data[:4]!r}")
    if data[4] != VERSION:
        raise UnsupportedFormat(f"unsupported version {data[4]}")


def _split_mode(mode_byte: int):
    sublayout = Sublayout.PACKED if mode_byte & PACKED_FLAG else Sublayout.COMPAT
    try:
        mode = CodecMode(mode_byte & _MODE_MASK)
    except ValueError:
        raise UnsupportedFormat(f"unknown mode byte 0x{mode_byte:02x}") from None
    return mode, sublayout


def decode(data: bytes) -> VoxelGridMessage:
    """
    Parse and validate an encoded message
    :param data: Bytes produced by encode
    :return: VoxelGridMessage (F=4 float32 features in mean mode)
    """
    data = bytes(data)
    _check_prefix(data)
    mode, sublayout = _split_mode(data[5])
    if len(data) < HEADER_SIZE:
        raise TruncatedMessage(f"header needs {HEADER_SIZE} bytes, got {len(data)}")
    fields = _HEADER.unpack_from(data, 0)
    sender_id, timestamp = fields[3], fields[4]
    pose_values = fields[5:17]
    level_byte = fields[17]
    origin, voxel_size, dims = fields[18:21], fields[21:24], fields[24:27]
    count = fields[27]

    per_voxel = COORD_BYTES[sublayout] + (MEAN_FEATURE_BYTES if mode == CodecMode.COORDS_PLUS_MEAN else 0)
    expected = HEADER_SIZE + count * per_voxel
    if len(data) < expected:
        raise TruncatedMessage(f"declared {count} voxels need {expected} bytes, got {len(data)}")
    if len(data) > expected:
        raise CorruptPayload(f"{len(data) - expected} trailing bytes after {count} voxels")

    try:
        level = Level(level_byte)
        pose = Pose.from_wire(pose_values)
        spec = GridSpec(np.asarray(origin), np.asarray(voxel_size), dims, level)
    except ValueError as e:
        raise CorruptPayload(f"invalid header: {e}") from None

    coord_dtype = _COORD_DTYPES[sublayout]
    coords = np.frombuffer(data, dtype=coord_dtype, count=count * 3, offset=HEADER_SIZE)
    coords = coords.reshape(-1, 3).astype(np.int64)
    try:
        check_coords(coords, spec.dims)
    except ValueError as e:
        raise CorruptPayload(str(e)) from None

    features = None
    if mode == CodecMode.COORDS_PLUS_MEAN:
        offset = HEADER_SIZE + count * COORD_BYTES[sublayout]
        features = np.frombuffer(data, dtype=_FEATURE_DTYPE, count=count * 4, offset=offset).reshape(-1, 4)
        if not np.isfinite(features).all():
            raise CorruptPayload("non-finite mean feature")
        features = features.astype(np.float32)

    grid = SparseVoxelGrid(spec, coords, features)
    return VoxelGridMessage(sender_id, timestamp, pose, spec, grid)
