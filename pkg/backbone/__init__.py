"""
Backbone
Multi-resolution sparse backbone: weights, stream wiring, final fusion and BEV mapping
"""

from .weights import (
    Stream,
    LayerSpec,
    ConvLayer,
    ConvBlockParams,
    BackboneWeights,
    layer_manifest,
    init_weights,
)
from .bev import BevMap, to_bev, write_bev, read_bev
from .network import ForwardTrace, ShapePlan, plan_shapes, run_block, run_stream, forward
from .io import save_weights, load_weights, encode_weights, decode_weights

__all__ = [
    "Stream",
    "LayerSpec",
    "ConvLayer",
    "ConvBlockParams",
    "BackboneWeights",
    "layer_manifest",
    "init_weights",
    "BevMap",
    "to_bev",
    "write_bev",
    "read_bev",
    "ForwardTrace",
    "ShapePlan",
    "plan_shapes",
    "run_block",
    "run_stream",
    "forward",
    "save_weights",
    "load_weights",
    "encode_weights",
    "decode_weights",
]
