"""
Voxel Grid Codec
SVG1 wire format plus message size and bandwidth accounting
"""

from .message import CodecMode, Sublayout, VoxelGridMessage, make_message
from .sizes import (
    HEADER_SIZE,
    SizeReport,
    payload_size,
    message_size,
    raw_cloud_size,
    bandwidth,
    display_mbps,
    reduction_vs_raw,
)
from .wire import encode, decode

__all__ = [
    "CodecMode",
    "Sublayout",
    "VoxelGridMessage",
    "make_message",
    "HEADER_SIZE",
    "SizeReport",
    "payload_size",
    "message_size",
    "raw_cloud_size",
    "bandwidth",
    "display_mbps",
    "reduction_vs_raw",
    "encode",
    "decode",
]
