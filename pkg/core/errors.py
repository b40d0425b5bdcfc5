"""
Error Hierarchy
Every failure raised by the grid, codec, sparse, backbone and comms packages
"""


class VoxelLinkError(Exception):
    """Base class for all VoxelLink errors"""


class DimensionMismatch(VoxelLinkError):
    """Grid extent is not an integer multiple of the voxel size"""


class SpecMismatch(VoxelLinkError):
    """Grids that must share a GridSpec do not"""


class ShapeError(VoxelLinkError):
    """Tensor shape or channel count does not fit the operation"""


class ConfigError(VoxelLinkError):
    """Invalid configuration file or command-line value (usage error)"""


class ScenarioError(VoxelLinkError):
    """Malformed scenario file or frame"""


class CodecError(VoxelLinkError):
    """Base class for wire format errors"""


class EncodingOverflow(CodecError):
    """A value does not fit the selected wire field width"""


class UnsupportedFormat(CodecError):
    """Bad magic, version, mode or manifest"""


class TruncatedMessage(CodecError):
    """Byte sequence ends before the declared content"""


class CorruptPayload(CodecError):
    """Payload decodes to values that violate the format invariants"""
