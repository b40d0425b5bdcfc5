"""
Engine Benchmark
Throughput of rulebook construction, both convolution modes and scatter-max
"""

import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from grid import delinearize
from .conv import sparse_conv
from .oracle import MAX_DENSE_SITES, dense_reachability
from .params import ConvMode, ConvParams
from .rulebook import build_rulebook
from .scatter import scatter_max
from .tensor import SparseTensor


@dataclass(frozen=True)
class BenchResult:
    kernel: str
    size: int
    sites: int
    rules: int
    seconds: float
    # dense cross-check of the rule count, None when the volume is too large to densify
    oracle_rules: Optional[int] = None

    @property
    def sites_per_second(self) -> float:
        return self.sites / max(self.seconds, 1e-9)


def random_tensor(rng: np.random.Generator, shape, channels: int, density: float) -> SparseTensor:
    """Tensor with round(density * volume) (at least one) distinct random active sites"""
    volume = int(np.prod(shape))
    count = max(1, int(round(density * volume)))
    keys = np.sort(rng.choice(volume, size=min(count, volume), replace=False))
    return SparseTensor(shape, delinearize(keys, shape), rng.standard_normal((len(keys), channels)))


def random_conv(rng: np.random.Generator, in_channels: int, out_channels: int,
                mode: ConvMode, stride: int = 1) -> ConvParams:
    weights = rng.standard_normal((27, in_channels, out_channels))
    return ConvParams(in_channels, out_channels, weights, mode, stride)


def _timed(fn: Callable):
    start = time.perf_counter()
    result = fn()
    return result, time.perf_counter() - start


def run_benchmark(sizes: Sequence[int], seed: int = 0, channels: int = 16,
                  density: float = 0.05, threads: int = 1) -> List[BenchResult]:
    """
    Benchmark every kernel on a cubic-ish volume per size (size x size x size/2)
    :param sizes: Edge lengths
    :param seed: Generator seed; operation counts depend only on it
    :param channels: Feature channels
    :param density: Fraction of active sites
    :param threads: Worker threads for convolution execution
    :return: One BenchResult per (kernel, size)
    """
    rng = np.random.default_rng(seed)
    results: List[BenchResult] = []
    for size in sizes:
        shape = (size, size, max(1, size // 2))
        t = random_tensor(rng, shape, channels, density)
        other = random_tensor(rng, shape, channels, density)
        subm = random_conv(rng, channels, channels, ConvMode.SUBMANIFOLD)
        strided = random_conv(rng, channels, channels, ConvMode.SPARSE, stride=2)
        small = int(np.prod(shape)) <= MAX_DENSE_SITES

        for name, params in (("rulebook/subm", subm), ("rulebook/strided", strided)):
            rulebook, seconds = _timed(lambda: build_rulebook(t.coords, t.shape, params))
            oracle = None
            if small:
                reach = dense_reachability(t, params)
                if params.mode == ConvMode.SUBMANIFOLD:
                    oracle = int(reach[t.coords[:, 0], t.coords[:, 1], t.coords[:, 2]].sum())
                else:
                    oracle = int(reach.sum())
            results.append(BenchResult(name, size, len(t), rulebook.rule_count, seconds, oracle))

            out, seconds = _timed(lambda: sparse_conv(t, params, rulebook, threads=threads))
            kernel = "conv/subm" if params.mode == ConvMode.SUBMANIFOLD else "conv/strided"
            results.append(BenchResult(kernel, size, len(out), rulebook.rule_count, seconds))

        fused, seconds = _timed(lambda: scatter_max(t, other))
        results.append(BenchResult("scatter/max", size, len(fused), len(t) + len(other), seconds))
    return results
