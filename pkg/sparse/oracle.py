"""
Dense Reference Convolution
Zero-padded strided 3D convolution on densified tensors, for verification at test scale
"""

import numpy as np

from .params import PADDING, ConvParams, conv_output_shape
from .rulebook import KERNEL_OFFSETS
from .tensor import SparseTensor

MAX_DENSE_SITES = 1 << 22


def densify(t: SparseTensor) -> np.ndarray:
    """(X, Y, Z, C) array with zeros at inactive sites"""
    if np.prod(t.shape) > MAX_DENSE_SITES:
        raise MemoryError(f"refusing to densify spatial shape {t.shape}")
    dense = np.zeros(t.shape + (t.channels,), dtype=np.float64)
    if len(t):
        dense[t.coords[:, 0], t.coords[:, 1], t.coords[:, 2]] = t.features
    return dense


def dense_oracle(t: SparseTensor, p: ConvParams) -> np.ndarray:
    """
    Plain dense convolution of the densified input (submanifold layers use stride 1)
    :param t: Input tensor
    :param p: Convolution parameters
    :return: (X', Y', Z', out_channels) dense output
    """
    dense = densify(t)
    padded = np.pad(dense, [(PADDING, PADDING)] * 3 + [(0, 0)])
    s = p.stride
    out_shape = conv_output_shape(t.shape, s)
    out = np.zeros(out_shape + (p.out_channels,), dtype=np.float64)
    weights = p.weights.astype(np.float64)
    for k, (kx, ky, kz) in enumerate(KERNEL_OFFSETS):
        window = padded[
            kx: kx + s * (out_shape[0] - 1) + 1: s,
            ky: ky + s * (out_shape[1] - 1) + 1: s,
            kz: kz + s * (out_shape[2] - 1) + 1: s,
        ]
        out += window @ weights[k]
    return out


def dense_reachability(t: SparseTensor, p: ConvParams) -> np.ndarray:
    """
    Per dense output site, the number of kernel taps landing on an active input
    :return: (X', Y', Z') integer array
    """
    occupancy = np.zeros(t.shape, dtype=np.int64)
    if len(t):
        occupancy[t.coords[:, 0], t.coords[:, 1], t.coords[:, 2]] = 1
    padded = np.pad(occupancy, PADDING)
    s = p.stride
    out_shape = conv_output_shape(t.shape, s)
    reach = np.zeros(out_shape, dtype=np.int64)
    for kx, ky, kz in KERNEL_OFFSETS:
        reach += padded[
            kx: kx + s * (out_shape[0] - 1) + 1: s,
            ky: ky + s * (out_shape[1] - 1) + 1: s,
            kz: kz + s * (out_shape[2] - 1) + 1: s,
        ]
    return reach
