"""
Rulebook Construction
(kernel offset, input site, output site) triples driving sparse convolution
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from grid import delinearize, linearize
from .params import PADDING, ConvMode, ConvParams

# offset k = 9*kx + 3*ky + kz, kx/ky/kz in {0, 1, 2}
KERNEL_OFFSETS = np.array([(kx, ky, kz) for kx in range(3) for ky in range(3) for kz in range(3)], dtype=np.int64)


@dataclass(frozen=True)
class Rulebook:
    """
    pairs[k] = (input site indices, output site indices) for kernel offset k
    For a fixed offset every input maps to at most one output and vice versa
    """

    out_shape: Tuple[int, int, int]
    out_coords: np.ndarray
    pairs: Tuple[Tuple[np.ndarray, np.ndarray], ...]

    @property
    def rule_count(self) -> int:
        return sum(len(i) for i, _ in self.pairs)

    def triples(self) -> np.ndarray:
        """All rules as an (R, 3) array of (offset, input, output)"""
        rows: List[np.ndarray] = []
        for k, (inp, out) in enumerate(self.pairs):
            rows.append(np.column_stack([np.full(len(inp), k, dtype=np.int64), inp, out]))
        return np.concatenate(rows) if rows else np.zeros((0, 3), dtype=np.int64)


def _lookup(sorted_keys: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Index of each query key in sorted_keys, -1 where absent"""
    if len(sorted_keys) == 0:
        return np.full(len(query), -1, dtype=np.int64)
    pos = np.searchsorted(sorted_keys, query)
    pos_clipped = np.minimum(pos, len(sorted_keys) - 1)
    return np.where(sorted_keys[pos_clipped] == query, pos_clipped, -1)


def _in_bounds(coords: np.ndarray, shape) -> np.ndarray:
    return ((coords >= 0) & (coords < np.asarray(shape, dtype=np.int64))).all(axis=1)


def build_rulebook(coords: np.ndarray, shape, params: ConvParams) -> Rulebook:
    """
    Build the rulebook of one convolution
    :param coords: Active input sites, sorted x-major and unique
    :param shape: Input spatial shape
    :param params: Convolution parameters (mode and stride matter)
    :return: Rulebook with output coordinates in canonical order
    """
    coords = np.asarray(coords, dtype=np.int64).reshape(-1, 3)
    shape = tuple(int(s) for s in shape)
    out_shape = params.output_shape(shape)
    in_keys = linearize(coords, shape)
    pairs = []

    if params.mode == ConvMode.SUBMANIFOLD:
        # output o gathers input o + k - 1
        for offset in KERNEL_OFFSETS:
            neighbour = coords + offset - PADDING
            valid = _in_bounds(neighbour, shape)
            found = np.full(len(coords), -1, dtype=np.int64)
            found[valid] = _lookup(in_keys, linearize(neighbour[valid], shape))
            out_idx = np.nonzero(found >= 0)[0]
            pairs.append((found[out_idx], out_idx))
        return Rulebook(out_shape, coords, tuple(pairs))

    # input i = o * stride + k - 1, so o = (i + 1 - k) / stride when divisible
    stride = params.stride
    candidates = []
    for offset in KERNEL_OFFSETS:
        num = coords + PADDING - offset
        valid = (num % stride == 0).all(axis=1)
        out = num // stride
        valid &= _in_bounds(out, out_shape)
        candidates.append((np.nonzero(valid)[0], out[valid]))
    all_out = np.concatenate([o for _, o in candidates]) if candidates else np.zeros((0, 3), dtype=np.int64)
    out_keys = np.unique(linearize(all_out, out_shape))
    for in_idx, out in candidates:
        pairs.append((in_idx.astype(np.int64), _lookup(out_keys, linearize(out, out_shape))))
    return Rulebook(out_shape, delinearize(out_keys, out_shape), tuple(pairs))