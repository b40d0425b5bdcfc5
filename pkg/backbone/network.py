"""
Multi-Resolution Backbone
Local stream, three collective streams, cross-resolution scatter-max wiring and final fusion
"""

import time
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from core.config import Config
from core.errors import ShapeError, SpecMismatch
from core.log import get_logger
from grid import (
    GridSpec,
    Level,
    PointCloud,
    SparseVoxelGrid,
    canonical_specs,
    center_features,
    mean_features,
    merge_grids,
    voxelize,
)
from sparse import SparseTensor, build_rulebook, conv_output_shape, norm_relu, scatter_max, sparse_conv
from .bev import BevMap, to_bev
from .weights import BackboneWeights, ConvBlockParams, Stream

logger = get_logger(__name__)

Shape = Tuple[int, int, int]

# taps[b]: tensor scatter-maxed with the output of block b before it feeds block b + 1
MEDIUM_TAPS = {2: Stream.LOW}
HIGH_TAPS = {1: Stream.MEDIUM, 2: Stream.MEDIUM}


class BlockTrace(NamedTuple):
    stream: str
    block: str
    shape: Shape
    channels: int
    active: int
    seconds: float


@dataclass
class ForwardTrace:
    """Per-block active-site counts and wall-clock timings of one forward pass"""

    blocks: List[BlockTrace] = field(default_factory=list)
    inputs: Dict[str, int] = field(default_factory=dict)
    seconds: float = 0.0

    def record(self, stream: str, block: str, t: SparseTensor, seconds: float) -> None:
        self.blocks.append(BlockTrace(stream, block, t.shape, t.channels, len(t), seconds))


class ShapePlan(NamedTuple):
    streams: Dict[Stream, Tuple[Tuple[Shape, int], ...]]
    fused_shape: Shape
    fused_channels: int
    bev_shape: Tuple[int, int, int]


def plan_shapes(specs: Optional[Mapping[Level, GridSpec]] = None) -> ShapePlan:
    """
    Symbolic shape trajectory of every stream, without allocating anything
    :param specs: Grid per level (canonical full volume by default)
    :return: ShapePlan
    """
    specs = specs or canonical_specs()
    streams = {}
    for stream in Stream:
        shape = tuple(specs[stream.level].dims)
        trajectory = []
        for b, channels in enumerate(Config.BLOCK_CHANNELS):
            if b in stream.strided_blocks:
                shape = conv_output_shape(shape, 2)
            trajectory.append((shape, channels))
        streams[stream] = tuple(trajectory)
    finals = {trajectory[-1][0] for trajectory in streams.values()}
    if len(finals) != 1:
        raise ShapeError(f"streams do not converge to one block-4 shape: {sorted(finals)}")
    fused_shape = finals.pop()
    fused_channels = len(("collective", "local")) * Config.FINAL_CHANNELS
    bev = (fused_shape[0], fused_shape[1], fused_shape[2] * fused_channels)
    return ShapePlan(streams, fused_shape, fused_channels, bev)


def run_block(t: SparseTensor, block: ConvBlockParams, threads: int = 1) -> SparseTensor:
    """Sparse layer, then two submanifold layers sharing one rulebook; each followed by norm + ReLU"""
    out = norm_relu(sparse_conv(t, block.sparse.conv, threads=threads), block.sparse.norm)
    rulebook = build_rulebook(out.coords, out.shape, block.subm1.conv)
    for layer in (block.subm1, block.subm2):
        out = norm_relu(sparse_conv(out, layer.conv, rulebook, threads), layer.norm)
    return out


def run_stream(input_grid: SparseVoxelGrid, stream: Stream, w: BackboneWeights,
               taps: Optional[Mapping[int, SparseTensor]] = None, expected_spec: Optional[GridSpec] = None,
               threads: int = 1, trace: Optional[ForwardTrace] = None) -> List[SparseTensor]:
    """
    Four consecutive convolution blocks of one stream
    :param input_grid: Featured grid at the stream's resolution
    :param stream: Which stream's weights to use
    :param w: Backbone weights
    :param taps: Block index -> tensor fused (scatter-max) into that block's output before the next block
    :param expected_spec: Grid the input must match exactly
    :param threads: Worker threads for convolution
    :param trace: Optional trace receiving per-block statistics
    :return: The four raw block outputs
    """
    if expected_spec is not None and input_grid.spec != expected_spec:
        raise ShapeError(f"{stream.value} stream expects {expected_spec!r}, got {input_grid.spec!r}")
    if input_grid.spec.level != stream.level:
        raise ShapeError(f"{stream.value} stream runs at {stream.level.label} resolution, "
                         f"got a {input_grid.spec.level.label} grid")
    if input_grid.feature_dim != w.in_channels:
        raise ShapeError(f"{stream.value} stream expects {w.in_channels} input features, "
                         f"got {input_grid.feature_dim}")
    taps = taps or {}
    x = SparseTensor.from_grid(input_grid)
    outputs: List[SparseTensor] = []
    for b, block in enumerate(w.streams[stream]):
        started = time.perf_counter()
        out = run_block(x, block, threads)
        if trace is not None:
            trace.record(stream.value, f"block{b + 1}", out, time.perf_counter() - started)
        outputs.append(out)
        x = scatter_max(out, taps[b]) if b in taps else out
    return outputs


def _featurize(grid: SparseVoxelGrid, in_channels: int) -> SparseVoxelGrid:
    if in_channels == Config.CENTER_FEATURES:
        return center_features(grid.without_features())
    if grid.feature_dim != Config.MEAN_FEATURES:
        raise ShapeError(f"mean-feature weights need F={Config.MEAN_FEATURES} grids, got F={grid.feature_dim}")
    return grid


def _ego_grid(ego_points: PointCloud, spec: GridSpec, in_channels: int) -> SparseVoxelGrid:
    if in_channels == Config.MEAN_FEATURES:
        return mean_features(ego_points, spec)
    return center_features(voxelize(ego_points, spec))


def collective_inputs(ego_points: PointCloud, collective: Sequence[Tuple[Level, SparseVoxelGrid]],
                      specs: Mapping[Level, GridSpec], in_channels: int) -> Dict[Level, SparseVoxelGrid]:
    """
    Merge CAV grids per level; levels nobody was assigned fall back to the voxelized ego cloud
    :return: Featured input grid per level
    """
    by_level: Dict[Level, List[SparseVoxelGrid]] = {}
    for level, grid in collective:
        level = Level(level)
        if grid.spec != specs[level]:
            raise SpecMismatch(f"{level.label} grid {grid.spec!r} does not match {specs[level]!r}")
        by_level.setdefault(level, []).append(grid)
    inputs = {}
    for level in Level:
        grids = by_level.get(level)
        if grids:
            inputs[level] = _featurize(merge_grids([_featurize(g, in_channels) for g in grids]), in_channels)
        else:
            logger.debug("no CAV assigned to %s, using the ego cloud", level.label)
            inputs[level] = _ego_grid(ego_points, specs[level], in_channels)
    return inputs


def forward(ego_points: PointCloud, collective: Sequence[Tuple[Level, SparseVoxelGrid]], w: BackboneWeights,
            specs: Optional[Mapping[Level, GridSpec]] = None, threads: int = 1,
            trace: Optional[ForwardTrace] = None) -> BevMap:
    """
    Full forward pass to a bird's-eye-view map
    :param ego_points: Ego point cloud in the ego frame
    :param collective: (assigned level, grid already regridded into the ego frame) per CAV
    :param w: Backbone weights
    :param specs: Grid per level (canonical full volume by default)
    :param threads: Worker threads for convolution
    :param trace: Optional trace receiving statistics
    :return: BevMap
    """
    started = time.perf_counter()
    specs = specs or canonical_specs()
    plan = plan_shapes(specs)
    inputs = collective_inputs(ego_points, collective, specs, w.in_channels)
    local_input = _ego_grid(ego_points, specs[Level.HIGH], w.in_channels)
    if trace is not None:
        trace.inputs.update({level.label: len(g) for level, g in inputs.items()})
        trace.inputs["local"] = len(local_input)

    def run(s: Stream, taps=None) -> List[SparseTensor]:
        return run_stream(inputs[s.level] if s is not Stream.LOCAL else local_input, s, w, taps,
                          specs[s.level], threads, trace)

    low = run(Stream.LOW)
    medium = run(Stream.MEDIUM, {b: low[b] for b in MEDIUM_TAPS})
    high = run(Stream.HIGH, {b: medium[b] for b in HIGH_TAPS})
    local = run(Stream.LOCAL)

    fused = scatter_max(high[-1], medium[-1], low[-1], local[-1])
    finals = []
    for name in ("collective_final", "local_final"):
        t0 = time.perf_counter()
        out = run_block(fused, getattr(w, name), threads)
        if trace is not None:
            trace.record(name, "final", out, time.perf_counter() - t0)
        finals.append(out)
    if not np.array_equal(finals[0].coords, finals[1].coords):
        raise ShapeError("final blocks disagree on the active set")
    concatenated = SparseTensor(fused.shape, finals[0].coords, np.hstack([f.features for f in finals]))
    bev = to_bev(concatenated, plan.fused_shape, plan.fused_channels, specs[Level.HIGH], w.seed)
    if trace is not None:
        trace.seconds = time.perf_counter() - started
    logger.debug("forward: %d fused sites, BEV %s", len(concatenated), bev.features.shape)
    return bev
