"""
Scenario Frames
One simulation timestep: every vehicle's pose and point cloud, plus the ego choice
"""

from dataclasses import dataclass
from typing import List, NamedTuple, Tuple

from core.config import Config
from core.errors import ScenarioError
from grid import PointCloud, Pose


class Vehicle(NamedTuple):
    vehicle_id: int
    pose: Pose
    cloud: PointCloud  # in the vehicle's own sensor frame


@dataclass(frozen=True)
class ScenarioFrame:
    timestamp: int
    ego_id: int
    vehicles: Tuple[Vehicle, ...]

    def __post_init__(self):
        vehicles = tuple(sorted(self.vehicles, key=lambda v: v.vehicle_id))
        ids = [v.vehicle_id for v in vehicles]
        if len(set(ids)) != len(ids):
            raise ScenarioError(f"frame at {self.timestamp} us has duplicate vehicle ids {ids}")
        if not Config.MIN_VEHICLES <= len(ids) <= Config.MAX_VEHICLES:
            raise ScenarioError(
                f"frame at {self.timestamp} us has {len(ids)} vehicles, "
                f"expected {Config.MIN_VEHICLES} to {Config.MAX_VEHICLES}"
            )
        if self.ego_id not in ids:
            raise ScenarioError(f"ego {self.ego_id} is not part of the frame at {self.timestamp} us")
        if self.timestamp < 0 or any(v < 0 for v in ids):
            raise ScenarioError("timestamps and vehicle ids must be non-negative")
        object.__setattr__(self, "vehicles", vehicles)

    @property
    def ego(self) -> Vehicle:
        return self.vehicle(self.ego_id)

    @property
    def others(self) -> List[Vehicle]:
        return [v for v in self.vehicles if v.vehicle_id != self.ego_id]

    def vehicle(self, vehicle_id: int) -> Vehicle:
        for v in self.vehicles:
            if v.vehicle_id == vehicle_id:
                return v
        raise KeyError(vehicle_id)
