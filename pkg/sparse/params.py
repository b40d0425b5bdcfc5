"""
Layer Parameters
Convolution and normalization parameters of the sparse engine
"""

from dataclasses import dataclass
from enum import IntEnum
from typing import Optional

import numpy as np

from core.config import Config
from core.errors import ShapeError

KERNEL_VOLUME = 27
CENTER_TAP = 13
PADDING = 1
PARAM_DTYPE = np.float32


def conv_output_shape(shape, stride: int):
    """floor((n + 2*pad - 3) / stride) + 1 per axis"""
    return tuple((int(n) + 2 * PADDING - 3) // stride + 1 for n in shape)


class ConvMode(IntEnum):
    SUBMANIFOLD = 0
    SPARSE = 1  # regular sparse convolution, strided or not


def _frozen(array, shape=None) -> np.ndarray:
    array = np.array(array, dtype=PARAM_DTYPE, copy=True)
    if shape is not None and array.shape != shape:
        raise ShapeError(f"expected parameter shape {shape}, got {array.shape}")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ConvParams:
    """3x3x3 kernel, padding 1, no bias; weights[k] maps in_channels to out_channels"""

    in_channels: int
    out_channels: int
    weights: np.ndarray
    mode: ConvMode = ConvMode.SUBMANIFOLD
    stride: int = 1

    def __post_init__(self):
        if self.in_channels < 1 or self.out_channels < 1:
            raise ShapeError("channel counts must be positive")
        if self.stride not in (1, 2):
            raise ShapeError(f"stride must be 1 or 2, got {self.stride}")
        mode = ConvMode(self.mode)
        if mode == ConvMode.SUBMANIFOLD and self.stride != 1:
            raise ShapeError("submanifold convolution requires stride 1")
        weights = _frozen(self.weights, (KERNEL_VOLUME, self.in_channels, self.out_channels))
        if not np.isfinite(weights).all():
            raise ValueError("convolution weights must be finite")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "mode", mode)

    @classmethod
    def identity(cls, channels: int, mode: ConvMode = ConvMode.SUBMANIFOLD, stride: int = 1) -> "ConvParams":
        """Centre tap is the identity matrix, every other tap is zero"""
        weights = np.zeros((KERNEL_VOLUME, channels, channels))
        weights[CENTER_TAP] = np.eye(channels)
        return cls(channels, channels, weights, mode, stride)

    @property
    def fan_in(self) -> int:
        return KERNEL_VOLUME * self.in_channels

    def output_shape(self, shape):
        """Spatial output shape; submanifold keeps the input shape"""
        if self.mode == ConvMode.SUBMANIFOLD:
            return tuple(shape)
        return conv_output_shape(shape, self.stride)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConvParams):
            return NotImplemented
        return (
            (self.in_channels, self.out_channels, self.mode, self.stride)
            == (other.in_channels, other.out_channels, other.mode, other.stride)
            and bool(np.array_equal(self.weights, other.weights))
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class NormParams:
    """Inference batch norm: gamma * (x - mean) / sqrt(var + eps) + beta"""

    gamma: np.ndarray
    beta: np.ndarray
    mean: np.ndarray
    var: np.ndarray
    eps: float = Config.NORM_EPS

    def __post_init__(self):
        gamma = _frozen(self.gamma)
        channels = gamma.shape
        if gamma.ndim != 1:
            raise ShapeError("normalization parameters must be 1-D")
        for name in ("beta", "mean", "var"):
            object.__setattr__(self, name, _frozen(getattr(self, name), channels))
        if (self.var < 0).any():
            raise ValueError("running variance must be non-negative")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "eps", float(PARAM_DTYPE(self.eps)))

    @classmethod
    def identity(cls, channels: int, eps: Optional[float] = None) -> "NormParams":
        return cls(np.ones(channels), np.zeros(channels), np.zeros(channels), np.ones(channels),
                   Config.NORM_EPS if eps is None else eps)

    @property
    def channels(self) -> int:
        return len(self.gamma)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NormParams):
            return NotImplemented
        return self.eps == other.eps and all(
            np.array_equal(getattr(self, n), getattr(other, n)) for n in ("gamma", "beta", "mean", "var")
        )

    __hash__ = None
