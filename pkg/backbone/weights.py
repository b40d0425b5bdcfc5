"""
Backbone Weights
Layer manifest, block parameters and seeded initialization of all streams
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, List, NamedTuple, Tuple

import numpy as np

from core.config import Config
from core.errors import ShapeError
from grid import Level
from sparse import ConvMode, ConvParams, NormParams, KERNEL_VOLUME


class Stream(Enum):
    LOCAL = "local"
    HIGH = "high"
    MEDIUM = "medium"
    LOW = "low"

    @property
    def level(self) -> Level:
        """Input resolution; the local stream runs at high resolution"""
        return Level.HIGH if self is Stream.LOCAL else Level[self.name]

    @property
    def strided_blocks(self) -> Tuple[int, ...]:
        return Config.STRIDED_BLOCKS[self.value]

    @classmethod
    def for_level(cls, level: Level) -> "Stream":
        return cls(Level(level).label)


FINAL_BLOCKS = ("collective_final", "local_final")


class LayerSpec(NamedTuple):
    name: str
    mode: ConvMode
    stride: int
    in_channels: int
    out_channels: int


@dataclass(frozen=True, eq=False)
class ConvLayer:
    conv: ConvParams
    norm: NormParams

    def __post_init__(self):
        if self.norm.channels != self.conv.out_channels:
            raise ShapeError(f"norm has {self.norm.channels} channels, conv outputs {self.conv.out_channels}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConvLayer):
            return NotImplemented
        return self.conv == other.conv and self.norm == other.norm

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ConvBlockParams:
    """One sparse (possibly strided) layer followed by two channel-preserving submanifold layers"""

    sparse: ConvLayer
    subm1: ConvLayer
    subm2: ConvLayer

    def __post_init__(self):
        if self.sparse.conv.mode != ConvMode.SPARSE:
            raise ShapeError("first layer of a block must be a sparse convolution")
        channels = self.sparse.conv.out_channels
        for layer in (self.subm1, self.subm2):
            if layer.conv.mode != ConvMode.SUBMANIFOLD:
                raise ShapeError("second and third layers of a block must be submanifold")
            if layer.conv.in_channels != channels or layer.conv.out_channels != channels:
                raise ShapeError(f"submanifold layers must keep {channels} channels")

    @property
    def layers(self) -> Tuple[ConvLayer, ConvLayer, ConvLayer]:
        return (self.sparse, self.subm1, self.subm2)

    @property
    def out_channels(self) -> int:
        return self.sparse.conv.out_channels

    @property
    def stride(self) -> int:
        return self.sparse.conv.stride

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConvBlockParams):
            return NotImplemented
        return all(a == b for a, b in zip(self.layers, other.layers))

    __hash__ = None


def _block_layers(prefix: str, in_channels: int, out_channels: int, stride: int) -> List[LayerSpec]:
    return [
        LayerSpec(f"{prefix}.conv0", ConvMode.SPARSE, stride, in_channels, out_channels),
        LayerSpec(f"{prefix}.conv1", ConvMode.SUBMANIFOLD, 1, out_channels, out_channels),
        LayerSpec(f"{prefix}.conv2", ConvMode.SUBMANIFOLD, 1, out_channels, out_channels),
    ]


def layer_manifest(in_channels: int = Config.CENTER_FEATURES) -> List[LayerSpec]:
    """Every layer of the network in serialization order"""
    manifest: List[LayerSpec] = []
    for stream in Stream:
        channels = in_channels
        for b, out_channels in enumerate(Config.BLOCK_CHANNELS):
            stride = 2 if b in stream.strided_blocks else 1
            manifest += _block_layers(f"{stream.value}.block{b + 1}", channels, out_channels, stride)
            channels = out_channels
    last = Config.BLOCK_CHANNELS[-1]
    for name in FINAL_BLOCKS:
        manifest += _block_layers(name, last, Config.FINAL_CHANNELS, 1)
    return manifest


@dataclass(frozen=True, eq=False)
class BackboneWeights:
    """Four blocks per stream plus the two final blocks"""

    streams: Dict[Stream, Tuple[ConvBlockParams, ...]]
    collective_final: ConvBlockParams
    local_final: ConvBlockParams
    seed: int
    in_channels: int = Config.CENTER_FEATURES

    def __post_init__(self):
        if set(self.streams) != set(Stream):
            raise ShapeError("weights need blocks for every stream")
        for stream, blocks in self.streams.items():
            if len(blocks) != len(Config.BLOCK_CHANNELS):
                raise ShapeError(f"{stream.value} stream needs {len(Config.BLOCK_CHANNELS)} blocks")
            channels = self.in_channels
            for b, block in enumerate(blocks):
                expected_stride = 2 if b in stream.strided_blocks else 1
                if block.sparse.conv.in_channels != channels or block.out_channels != Config.BLOCK_CHANNELS[b]:
                    raise ShapeError(f"{stream.value} block {b + 1} breaks the channel schedule")
                if block.stride != expected_stride:
                    raise ShapeError(f"{stream.value} block {b + 1} must use stride {expected_stride}")
                channels = block.out_channels
        for block in (self.collective_final, self.local_final):
            if block.stride != 1 or block.sparse.conv.in_channels != Config.BLOCK_CHANNELS[-1]:
                raise ShapeError("final blocks must be stride-1 on the block-4 channels")

    def named_layers(self) -> Iterator[Tuple[str, ConvLayer]]:
        """(name, layer) pairs in layer_manifest order"""
        for stream in Stream:
            for b, block in enumerate(self.streams[stream]):
                for i, layer in enumerate(block.layers):
                    yield f"{stream.value}.block{b + 1}.conv{i}", layer
        for name in FINAL_BLOCKS:
            for i, layer in enumerate(getattr(self, name).layers):
                yield f"{name}.conv{i}", layer

    def __eq__(self, other) -> bool:
        if not isinstance(other, BackboneWeights):
            return NotImplemented
        if (self.seed, self.in_channels) != (other.seed, other.in_channels):
            return False
        return all(a == b for (_, a), (_, b) in zip(self.named_layers(), other.named_layers()))

    __hash__ = None


def assemble_weights(layers: List[ConvLayer], seed: int, in_channels: int) -> BackboneWeights:
    """
    Group manifest-ordered layers back into blocks
    :param layers: One ConvLayer per layer_manifest entry
    :param seed: Seed recorded with the weights
    :param in_channels: Input feature width of block 1
    :return: BackboneWeights
    """
    blocks = [ConvBlockParams(*layers[i:i + 3]) for i in range(0, len(layers), 3)]
    per_stream = len(Config.BLOCK_CHANNELS)
    streams = {stream: tuple(blocks[s * per_stream:(s + 1) * per_stream]) for s, stream in enumerate(Stream)}
    tail = blocks[len(Stream) * per_stream:]
    if len(tail) != len(FINAL_BLOCKS):
        raise ShapeError(f"expected {len(FINAL_BLOCKS)} final blocks, got {len(tail)}")
    return BackboneWeights(streams, tail[0], tail[1], seed, in_channels)


def init_weights(seed: int = Config.DEFAULT_SEED, in_channels: int = Config.CENTER_FEATURES) -> BackboneWeights:
    """
    Seeded uniform init in +-sqrt(6 / fan_in) with identity normalization
    :param seed: u64 seed
    :param in_channels: 3 for centre features, 4 for mean features
    :return: BackboneWeights
    """
    rng = np.random.default_rng(seed)
    layers = []
    for spec in layer_manifest(in_channels):
        bound = math.sqrt(6.0 / (KERNEL_VOLUME * spec.in_channels))
        weights = rng.uniform(-bound, bound, size=(KERNEL_VOLUME, spec.in_channels, spec.out_channels))
        conv = ConvParams(spec.in_channels, spec.out_channels, weights, spec.mode, spec.stride)
        layers.append(ConvLayer(conv, NormParams.identity(spec.out_channels)))
    return assemble_weights(layers, seed, in_channels)
