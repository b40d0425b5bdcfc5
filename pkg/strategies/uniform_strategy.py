"""
Uniform Random Strategy
Every in-range CAV draws its level uniformly from High, Medium and Low
"""

from typing import Iterable, Sequence, Union

import numpy as np

from core.config import Config
from core.base_strategy import Assignment, AssignmentStrategy, Candidate
from grid import Level


def assign_uniform(ids: Iterable[int], rng_seed: Union[int, np.random.Generator]) -> Assignment:
    """
    Independent uniform level per id, drawn in ascending id order
    :param ids: CAV ids
    :param rng_seed: Seed, or a generator to keep drawing from
    :return: Assignment
    """
    rng = np.random.default_rng(rng_seed)
    ids = sorted(ids)
    draws = rng.integers(0, len(Level), size=len(ids))
    return {vid: Level(int(d)) for vid, d in zip(ids, draws)}


class UniformStrategy(AssignmentStrategy):
    """Seeded uniform random assignment; one generator per run"""

    def __init__(self, seed: int = Config.DEFAULT_SEED):
        super().__init__(seed)
        self.rng = np.random.default_rng(seed)

    @property
    def name(self) -> str:
        return "Uniform Random"

    @property
    def description(self) -> str:
        return "Each in-range CAV gets High, Medium or Low with probability 1/3"

    @property
    def strategy_type(self) -> str:
        return "uniform"

    def assign(self, candidates: Sequence[Candidate], cfg) -> Assignment:
        return self.record(assign_uniform([c.vehicle_id for c in candidates], self.rng))

    def reset(self):
        super().reset()
        self.rng = np.random.default_rng(self.seed)
