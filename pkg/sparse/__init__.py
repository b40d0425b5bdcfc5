"""
Sparse Convolution Engine
Sparse tensors, rulebooks, submanifold/strided convolution, normalization and scatter fusion
"""

from .tensor import SparseTensor
from .params import ConvMode, ConvParams, NormParams, KERNEL_VOLUME, CENTER_TAP, conv_output_shape
from .rulebook import Rulebook, build_rulebook, KERNEL_OFFSETS
from .conv import sparse_conv, norm_relu
from .scatter import Reduce, scatter, scatter_max
from .oracle import densify, dense_oracle, dense_reachability

__all__ = [
    "SparseTensor",
    "ConvMode",
    "ConvParams",
    "NormParams",
    "KERNEL_VOLUME",
    "CENTER_TAP",
    "conv_output_shape",
    "Rulebook",
    "build_rulebook",
    "KERNEL_OFFSETS",
    "sparse_conv",
    "norm_relu",
    "Reduce",
    "scatter",
    "scatter_max",
    "densify",
    "dense_oracle",
    "dense_reachability",
]
