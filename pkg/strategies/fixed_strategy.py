"""
Fixed Level Strategy
Single-resolution runs: every in-range CAV sends at the same level
"""

from typing import Iterable, Sequence, Union

from core.base_strategy import Assignment, AssignmentStrategy, Candidate
from core.config import Config
from grid import Level


def assign_fixed(ids: Iterable[int], level: Union[Level, str]) -> Assignment:
    level = Level.from_name(level) if isinstance(level, str) else Level(level)
    return {vid: level for vid in sorted(ids)}


class FixedStrategy(AssignmentStrategy):
    """The two unassigned streams fall back to the ego cloud"""

    def __init__(self, seed: int = Config.DEFAULT_SEED, level: Union[Level, str] = Level.HIGH):
        super().__init__(seed)
        self.level = Level.from_name(level) if isinstance(level, str) else Level(level)

    @property
    def name(self) -> str:
        return f"Fixed {self.level.label.capitalize()}"

    @property
    def description(self) -> str:
        return "Every in-range CAV sends at one chosen level"

    @property
    def strategy_type(self) -> str:
        return "fixed"

    def assign(self, candidates: Sequence[Candidate], cfg) -> Assignment:
        return self.record(assign_fixed([c.vehicle_id for c in candidates], self.level))
