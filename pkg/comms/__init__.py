"""
Collective Perception Channel
Scenario frames, range gating, bandwidth reports and the per-frame simulator
"""

from .scenario import ScenarioFrame, Vehicle
from .channel import ChannelConfig, FrameReport, AggregateReport, filter_in_range, aggregate
from .simulator import step, simulate, simulate_pinned
from .scene_gen import gen_scene, gen_scenario
from .scenario_io import read_scenario, write_scenario

__all__ = [
    "ScenarioFrame",
    "Vehicle",
    "ChannelConfig",
    "FrameReport",
    "AggregateReport",
    "filter_in_range",
    "aggregate",
    "step",
    "simulate",
    "simulate_pinned",
    "gen_scene",
    "gen_scenario",
    "read_scenario",
    "write_scenario",
]
