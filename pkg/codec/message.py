"""
Voxel Grid Messages
What one CAV sends per frame: identity, timestamp, pose and its sparse grid
"""

from dataclasses import dataclass
from enum import IntEnum

from grid import GridSpec, Pose, SparseVoxelGrid


class CodecMode(IntEnum):
    COORDS_ONLY = 0
    COORDS_PLUS_MEAN = 1

    @classmethod
    def from_name(cls, name: str) -> "CodecMode":
        return {"coords": cls.COORDS_ONLY, "mean": cls.COORDS_PLUS_MEAN}[name]


class Sublayout(IntEnum):
    COMPAT = 0  # 3 x u32 per voxel
    PACKED = 1  # 3 x u16 per voxel

    @classmethod
    def from_name(cls, name: str) -> "Sublayout":
        return {"compat": cls.COMPAT, "packed": cls.PACKED}[name]


@dataclass(frozen=True, eq=False)
class VoxelGridMessage:
    """The pose is kept at float32 precision, as carried on the wire"""

    sender_id: int
    timestamp: int
    sender_pose: Pose
    spec: GridSpec
    payload: SparseVoxelGrid

    def __post_init__(self):
        if self.payload.spec != self.spec:
            raise ValueError(f"payload spec {self.payload.spec!r} differs from message spec {self.spec!r}")
        if self.sender_id < 0 or self.timestamp < 0:
            raise ValueError("sender_id and timestamp must be non-negative")
        object.__setattr__(self, "sender_pose", self.sender_pose.quantized())

    @property
    def voxel_count(self) -> int:
        return len(self.payload)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VoxelGridMessage):
            return NotImplemented
        return (
            self.sender_id == other.sender_id
            and self.timestamp == other.timestamp
            and self.sender_pose == other.sender_pose
            and self.spec == other.spec
            and self.payload == other.payload
        )

    __hash__ = None


def make_message(sender_id: int, timestamp: int, sender_pose: Pose, grid: SparseVoxelGrid,
                 mode: CodecMode = CodecMode.COORDS_ONLY) -> VoxelGridMessage:
    """
    Wrap a grid in a message shaped for the mode: bare coordinates, or float32 mean features
    :param sender_id: Sending CAV
    :param timestamp: Microseconds since scenario start
    :param sender_pose: Sender frame in world coordinates
    :param grid: Grid in the sender's frame
    :param mode: Codec mode the message will be encoded with
    :return: VoxelGridMessage
    """
    if CodecMode(mode) == CodecMode.COORDS_PLUS_MEAN:
        if grid.feature_dim != 4:
            raise ValueError(f"mean-feature messages need F=4 features, got F={grid.feature_dim}")
        payload = SparseVoxelGrid(grid.spec, grid.coords, grid.features.astype("<f4"))
    else:
        payload = grid.without_features()
    return VoxelGridMessage(sender_id, timestamp, sender_pose, grid.spec, payload)
