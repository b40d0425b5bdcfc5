"""
Scatter Fusion
Union of sparse tensors with a permutation-invariant reduction on shared sites
"""

from enum import Enum
from typing import Sequence

import numpy as np

from core.errors import ShapeError
from grid import delinearize
from .tensor import SparseTensor


class Reduce(Enum):
    MAX = "max"
    MIN = "min"
    SUM = "sum"
    MEAN = "mean"
    MUL = "mul"


_SEGMENT_UFUNC = {
    Reduce.MAX: np.maximum,
    Reduce.MIN: np.minimum,
    Reduce.SUM: np.add,
    Reduce.MEAN: np.add,
    Reduce.MUL: np.multiply,
}


def scatter(tensors: Sequence[SparseTensor], reduce: Reduce = Reduce.MAX) -> SparseTensor:
    """
    Concatenate the tensors and reduce features of duplicate coordinates
    :param tensors: Tensors sharing spatial shape and channel count
    :param reduce: Reduction applied where a site is active in several inputs
    :return: Tensor over the union of active sets
    """
    if not tensors:
        raise ShapeError("scatter needs at least one tensor")
    shape, channels = tensors[0].shape, tensors[0].channels
    for t in tensors[1:]:
        if t.shape != shape or t.channels != channels:
            raise ShapeError(f"cannot scatter {t.shape}x{t.channels} with {shape}x{channels}")
    if len(tensors) == 1:
        return tensors[0]

    keys = np.concatenate([t.keys() for t in tensors])
    features = np.concatenate([t.features for t in tensors])
    if len(keys) == 0:
        return SparseTensor.empty(shape, channels)
    # stable sort: each segment lists its rows in input order
    order = np.argsort(keys, kind="stable")
    unique_keys, starts, counts = np.unique(keys[order], return_index=True, return_counts=True)
    reduced = _SEGMENT_UFUNC[reduce].reduceat(features[order], starts, axis=0)
    if reduce == Reduce.MEAN:
        reduced = reduced / counts[:, None]
    return SparseTensor(shape, delinearize(unique_keys, shape), reduced)


def scatter_max(*tensors: SparseTensor) -> SparseTensor:
    return scatter(tensors, Reduce.MAX)
