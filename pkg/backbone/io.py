"""
Weights Container
MRW1: little-endian header, layer manifest, then raw f32 tensors in manifest order
"""

import struct
from typing import List, Tuple

import numpy as np

from core.errors import CorruptPayload, TruncatedMessage, UnsupportedFormat
from core.log import get_logger
from sparse import ConvMode, ConvParams, NormParams, KERNEL_VOLUME
from .weights import BackboneWeights, ConvLayer, LayerSpec, assemble_weights, layer_manifest

logger = get_logger(__name__)

WEIGHTS_MAGIC = b"MRW1"
WEIGHTS_VERSION = 1
_HEADER = struct.Struct("<4sBQII")
_ENTRY = struct.Struct("<BBII")
_NAME_LEN = struct.Struct("<H")
_F32 = np.dtype("<f4")


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise TruncatedMessage(f"weights file ends at byte {len(self.data)}, needed {self.pos + n}")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: struct.Struct) -> Tuple:
        return fmt.unpack(self.take(fmt.size))

    def floats(self, shape) -> np.ndarray:
        count = int(np.prod(shape))
        return np.frombuffer(self.take(count * _F32.itemsize), dtype=_F32).reshape(shape)


def encode_weights(w: BackboneWeights) -> bytes:
    manifest = layer_manifest(w.in_channels)
    parts = [_HEADER.pack(WEIGHTS_MAGIC, WEIGHTS_VERSION, w.seed, w.in_channels, len(manifest))]
    for spec in manifest:
        name = spec.name.encode("ascii")
        parts += [_NAME_LEN.pack(len(name)), name,
                  _ENTRY.pack(int(spec.mode), spec.stride, spec.in_channels, spec.out_channels)]
    for _, layer in w.named_layers():
        norm = layer.norm
        for array in (layer.conv.weights, norm.gamma, norm.beta, norm.mean, norm.var):
            parts.append(np.ascontiguousarray(array, dtype=_F32).tobytes())
        parts.append(np.array([norm.eps], dtype=_F32).tobytes())
    return b"".join(parts)


def decode_weights(data: bytes) -> BackboneWeights:
    """
    Parse an MRW1 container
    :param data: Complete file contents
    :return: BackboneWeights
    """
    reader = _Reader(data)
    magic, version, seed, in_channels, count = reader.unpack(_HEADER)
    if magic != WEIGHTS_MAGIC:
        raise UnsupportedFormat(f"Not a weights file (magic {magic!r})")
    if version != WEIGHTS_VERSION:
        raise UnsupportedFormat(f"Unsupported weights version {version}")

    manifest: List[LayerSpec] = []
    for _ in range(count):
        (length,) = reader.unpack(_NAME_LEN)
        name = reader.take(length).decode("ascii", errors="replace")
        mode, stride, cin, cout = reader.unpack(_ENTRY)
        manifest.append(LayerSpec(name, mode, stride, cin, cout))
    expected = [tuple(s) for s in layer_manifest(in_channels)]
    if [tuple(s) for s in manifest] != expected:
        raise UnsupportedFormat("weights manifest does not match the backbone layer layout")

    layers = []
    for spec in manifest:
        weights = reader.floats((KERNEL_VOLUME, spec.in_channels, spec.out_channels))
        gamma, beta, mean, var = (reader.floats((spec.out_channels,)) for _ in range(4))
        (eps,) = reader.floats((1,))
        try:
            conv = ConvParams(spec.in_channels, spec.out_channels, weights, ConvMode(spec.mode), spec.stride)
            norm = NormParams(gamma, beta, mean, var, float(eps))
        except ValueError as e:
            raise CorruptPayload(f"{spec.name}: {e}") from None
        layers.append(ConvLayer(conv, norm))
    if reader.pos != len(data):
        raise CorruptPayload(f"{len(data) - reader.pos} trailing bytes after the last tensor")
    return assemble_weights(layers, seed, in_channels)


def save_weights(w: BackboneWeights, path: str) -> int:
    data = encode_weights(w)
    with open(path, "wb") as f:
        f.write(data)
    logger.debug("wrote %d bytes of weights (seed %d) to %s", len(data), w.seed, path)
    return len(data)


def load_weights(path: str) -> BackboneWeights:
    with open(path, "rb") as f:
        return decode_weights(f.read())
