"""
Base Assignment Strategy
All resolution-assignment strategies inherit from this class
"""

from abc import ABC, abstractmethod
from collections import deque
from typing import Dict, Mapping, NamedTuple, Sequence

from grid import Level
from .config import Config

Assignment = Dict[int, Level]


class Candidate(NamedTuple):
    """An in-range CAV as seen by a strategy"""

    vehicle_id: int
    distance: float
    level_bytes: Mapping[Level, int]


class AssignmentStrategy(ABC):
    """
    Abstract base class for resolution-assignment strategies
    Decides, per frame, which level each in-range CAV transmits at
    """

    def __init__(self, seed: int = Config.DEFAULT_SEED):
        """
        Initialize base strategy
        :param seed: Seed for strategies that draw random numbers
        """
        self.seed = seed
        self.history: deque = deque(maxlen=Config.STRATEGY_HISTORY)

    @property
    @abstractmethod
    def name(self) -> str:
        """Strategy display name (e.g., 'Uniform Random')"""

    @property
    @abstractmethod
    def description(self) -> str:
        """Strategy description for help text"""

    @property
    @abstractmethod
    def strategy_type(self) -> str:
        """Strategy type identifier (e.g., 'uniform', 'budget')"""

    @abstractmethod
    def assign(self, candidates: Sequence[Candidate], cfg) -> Assignment:
        """
        Main assignment method - must be implemented by subclasses
        :param candidates: In-range CAVs with their per-level message sizes
        :param cfg: ChannelConfig of the run
        :return: CAV id -> level; omitted ids send nothing
        """

    def record(self, assignment: Assignment) -> Assignment:
        self.history.append(dict(assignment))
        return assignment

    def reset(self):
        """Reset strategy state (history, random generator)"""
        self.history.clear()
