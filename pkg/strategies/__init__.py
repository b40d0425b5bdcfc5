"""
Strategy Module Package
Registry of all resolution-assignment strategies
"""

from typing import List, Optional, Type

from core.base_strategy import AssignmentStrategy

from .uniform_strategy import UniformStrategy, assign_uniform
from .budget_strategy import BudgetStrategy, assign_budget, projected_mbps
from .fixed_strategy import FixedStrategy, assign_fixed

# Strategy registry for lookup by type
AVAILABLE_STRATEGIES: List[Type[AssignmentStrategy]] = [
    UniformStrategy,
    BudgetStrategy,
    FixedStrategy,
]


def get_strategy_by_type(strategy_type: str) -> Optional[Type[AssignmentStrategy]]:
    """
    Get strategy class by type identifier
    :param strategy_type: Strategy type (e.g., 'uniform', 'budget', 'fixed')
    :return: Strategy class or None
    """
    for strategy_class in AVAILABLE_STRATEGIES:
        if strategy_class().strategy_type == strategy_type:
            return strategy_class
    return None


def get_all_strategies() -> List[Type[AssignmentStrategy]]:
    return AVAILABLE_STRATEGIES


__all__ = [
    "UniformStrategy",
    "BudgetStrategy",
    "FixedStrategy",
    "assign_uniform",
    "assign_budget",
    "assign_fixed",
    "projected_mbps",
    "AVAILABLE_STRATEGIES",
    "get_strategy_by_type",
    "get_all_strategies",
]
