"""
VoxelLink Core Framework
Configuration, errors, logging, terminal UI and reporting shared by every command
"""

__version__ = "1.0.0"

from .config import Config, RunConfig, load_config
from .errors import VoxelLinkError
from .ui import UI
from .reporter import Reporter

__all__ = ["Config", "RunConfig", "load_config", "VoxelLinkError", "UI", "Reporter"]
