"""
Sparse Convolution Execution
Gather - per-offset GEMM - scatter-add over a rulebook
"""

from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np

from core.errors import ShapeError
from .params import ConvParams, NormParams
from .rulebook import Rulebook, build_rulebook
from .tensor import FEATURE_DTYPE, SparseTensor


def _offset_product(features: np.ndarray, weights: np.ndarray, in_idx: np.ndarray) -> np.ndarray:
    return features[in_idx] @ weights


def sparse_conv(t: SparseTensor, p: ConvParams, rulebook: Optional[Rulebook] = None,
                threads: int = 1) -> SparseTensor:
    """
    out[o] = sum over rules (k, i, o) of W[k]^T in[i]
    :param t: Input tensor
    :param p: Convolution parameters
    :param rulebook: Precomputed rulebook for t's active set (built when omitted)
    :param threads: Worker threads for the per-offset products
    :return: Output tensor
    """
    if t.channels != p.in_channels:
        raise ShapeError(f"tensor has {t.channels} channels, convolution expects {p.in_channels}")
    if rulebook is None:
        rulebook = build_rulebook(t.coords, t.shape, p)
    weights = p.weights.astype(FEATURE_DTYPE)
    out = np.zeros((len(rulebook.out_coords), p.out_channels), dtype=FEATURE_DTYPE)

    active = [k for k, (inp, _) in enumerate(rulebook.pairs) if len(inp)]
    if threads > 1 and len(active) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            products: List[np.ndarray] = list(pool.map(
                lambda k: _offset_product(t.features, weights[k], rulebook.pairs[k][0]), active))
    else:
        products = [_offset_product(t.features, weights[k], rulebook.pairs[k][0]) for k in active]

    # fixed accumulation order (offset 0..26) keeps results independent of the thread count
    for k, product in zip(active, products):
        out[rulebook.pairs[k][1]] += product
    return SparseTensor(rulebook.out_shape, rulebook.out_coords, out)


def norm_relu(t: SparseTensor, n: NormParams) -> SparseTensor:
    """Inference batch norm followed by ReLU, per channel"""
    if t.channels != n.channels:
        raise ShapeError(f"tensor has {t.channels} channels, normalization expects {n.channels}")
    scale = n.gamma.astype(FEATURE_DTYPE) / np.sqrt(n.var.astype(FEATURE_DTYPE) + n.eps)
    shifted = (t.features - n.mean.astype(FEATURE_DTYPE)) * scale + n.beta.astype(FEATURE_DTYPE)
    return t.with_features(np.maximum(shifted, 0.0))
