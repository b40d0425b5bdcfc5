"""
Budget Greedy Strategy
Highest levels that keep the projected channel load within a capacity
"""

from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from core.base_strategy import Assignment, AssignmentStrategy, Candidate
from core.log import get_logger
from grid import Level

logger = get_logger(__name__)

CostTable = Union[Mapping[Level, int], Mapping[int, Mapping[Level, int]]]


def projected_mbps(assignment: Assignment, costs: Mapping[int, Mapping[Level, int]], frequency: float) -> Fraction:
    """Exact Mbit/s of sending every assigned message once per frame"""
    total = sum(costs[vid][level] for vid, level in assignment.items())
    return Fraction(total) * 8 * Fraction(frequency) / 10 ** 6


def _per_vehicle(ids, per_level_cost: CostTable) -> Mapping[int, Mapping[Level, int]]:
    if all(isinstance(k, Level) for k in per_level_cost):
        return {vid: per_level_cost for vid in ids}
    return per_level_cost


def assign_budget(ids: Iterable[int], per_level_cost: CostTable, capacity: Optional[float],
                  frequency: float, distances: Optional[Mapping[int, float]] = None) -> Assignment:
    """
    Greedy degradation from all-High until the budget holds
    :param ids: In-range CAV ids
    :param per_level_cost: Message bytes per level, shared or per CAV id
    :param capacity: Mbit/s budget, None for unlimited
    :param frequency: Messages per second
    :param distances: Distance of each CAV to the ego, used to pick CAVs to drop
    :return: Assignment; CAVs left out are dropped
    """
    ids = sorted(set(ids))
    assignment: Assignment = {vid: Level.HIGH for vid in ids}
    if capacity is None:
        return assignment
    if not capacity > 0:
        raise ValueError(f"capacity must be positive, got {capacity}")
    costs = _per_vehicle(ids, per_level_cost)
    budget = Fraction(capacity)

    def fits() -> bool:
        return projected_mbps(assignment, costs, frequency) <= budget

    for source, target in ((Level.HIGH, Level.MEDIUM), (Level.MEDIUM, Level.LOW)):
        for vid in reversed(ids):
            if fits():
                return assignment
            if assignment[vid] == source:
                assignment[vid] = target

    # farthest first, higher id first on ties
    distances = distances or {}
    drop_order = sorted(ids, key=lambda vid: (distances.get(vid, 0.0), vid), reverse=True)
    for vid in drop_order:
        if fits():
            break
        del assignment[vid]
        logger.debug("budget %.3f Mbit/s: dropping CAV %d", capacity, vid)
    assert fits(), "budget assignment exceeds capacity"
    return assignment


class BudgetStrategy(AssignmentStrategy):
    """Capacity-bound greedy assignment; needs ChannelConfig.capacity"""

    @property
    def name(self) -> str:
        return "Budget Greedy"

    @property
    def description(self) -> str:
        return "Degrade High -> Medium -> Low by descending id, then drop the farthest CAVs"

    @property
    def strategy_type(self) -> str:
        return "budget"

    def assign(self, candidates: Sequence[Candidate], cfg) -> Assignment:
        costs = {c.vehicle_id: c.level_bytes for c in candidates}
        distances = {c.vehicle_id: c.distance for c in candidates}
        return self.record(assign_budget(costs, costs, cfg.capacity, cfg.frequency, distances))
