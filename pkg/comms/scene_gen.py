"""
Synthetic Scenes
Seeded urban-like frames: vehicles on a lane lattice, clouds of ground points and box clusters
"""

import math
from typing import List, Optional

import numpy as np

from core.config import Config
from core.errors import ScenarioError
from grid import PointCloud, Pose
from .scenario import ScenarioFrame, Vehicle

SENSOR_HEIGHT_M = 1.8
LATTICE_X = np.arange(-100.0, 100.1, 20.0)
LATTICE_Y = np.array([-10.5, -3.5, 3.5, 10.5])
JITTER_M = 1.5
VEHICLE_BOX = np.array([4.5, 1.8, 1.5])
PARKED_BOXES = 48
GROUND_SHARE = 0.55


def _box(center_xy, size, yaw) -> np.ndarray:
    """(center x, y, z, size x, y, z, yaw) with the box resting on the ground"""
    return np.array([center_xy[0], center_xy[1], size[2] / 2, size[0], size[1], size[2], yaw])


def _sample_ground(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    # density falls off with range like a spinning lidar
    r = radius * rng.uniform(0.0, 1.0, n) ** 2
    theta = rng.uniform(0.0, 2 * math.pi, n)
    return np.column_stack([r * np.cos(theta), r * np.sin(theta), np.zeros(n)])


def _sample_boxes(rng: np.random.Generator, boxes: np.ndarray, n: int) -> np.ndarray:
    """Points on the box surfaces (one face per point)"""
    if n == 0 or len(boxes) == 0:
        return np.zeros((0, 3))
    pick = boxes[rng.integers(0, len(boxes), n)]
    local = rng.uniform(-0.5, 0.5, (n, 3))
    axis = rng.integers(0, 3, n)
    local[np.arange(n), axis] = np.where(rng.uniform(size=n) < 0.5, -0.5, 0.5)
    local *= pick[:, 3:6]
    c, s = np.cos(pick[:, 6]), np.sin(pick[:, 6])
    x = c * local[:, 0] - s * local[:, 1] + pick[:, 0]
    y = s * local[:, 0] + c * local[:, 1] + pick[:, 1]
    z = local[:, 2] + pick[:, 2]
    return np.column_stack([x, y, z])


def gen_scene(seed: int, n_vehicles: int, points_per_vehicle: int = Config.POINTS_PER_VEHICLE,
              timestamp: int = 0, ego_id: Optional[int] = None) -> ScenarioFrame:
    """
    Deterministic synthetic frame
    :param seed: Scene seed
    :param n_vehicles: 2 to 7 vehicles
    :param points_per_vehicle: Points in each vehicle's cloud
    :param timestamp: Frame timestamp in microseconds
    :param ego_id: Ego vehicle (drawn from the seed when omitted)
    :return: ScenarioFrame with ids 1..n_vehicles
    """
    if not Config.MIN_VEHICLES <= n_vehicles <= Config.MAX_VEHICLES:
        raise ScenarioError(f"n_vehicles must be {Config.MIN_VEHICLES}..{Config.MAX_VEHICLES}, got {n_vehicles}")
    if points_per_vehicle < 1:
        raise ScenarioError("points_per_vehicle must be positive")
    rng = np.random.default_rng(seed)

    slots = rng.choice(len(LATTICE_X) * len(LATTICE_Y), size=n_vehicles, replace=False)
    xy = np.column_stack([LATTICE_X[slots // len(LATTICE_Y)], LATTICE_Y[slots % len(LATTICE_Y)]])
    xy += rng.uniform(-JITTER_M, JITTER_M, xy.shape)
    # lanes with y < 0 drive towards +x
    yaws = np.where(xy[:, 1] < 0, 0.0, math.pi) + rng.uniform(-0.1, 0.1, n_vehicles)

    parked_xy = np.column_stack([
        rng.uniform(-130.0, 130.0, PARKED_BOXES),
        rng.choice([-1.0, 1.0], PARKED_BOXES) * rng.uniform(15.0, 35.0, PARKED_BOXES),
    ])
    parked_size = VEHICLE_BOX * rng.uniform(0.8, 2.5, (PARKED_BOXES, 3))
    parked = np.array([_box(c, s, y) for c, s, y in zip(parked_xy, parked_size, rng.uniform(0, math.pi, PARKED_BOXES))])
    moving = np.array([_box(c, VEHICLE_BOX, y) for c, y in zip(xy, yaws)])

    vehicles = []
    for i in range(n_vehicles):
        pose = Pose.from_euler(0.0, 0.0, float(yaws[i]), (xy[i, 0], xy[i, 1], SENSOR_HEIGHT_M))
        boxes = np.concatenate([parked, np.delete(moving, i, axis=0)])
        n_ground = int(points_per_vehicle * GROUND_SHARE)
        ground = _sample_ground(rng, n_ground, Config.SENSOR_RANGE_M) + [xy[i, 0], xy[i, 1], 0.0]
        objects = _sample_boxes(rng, boxes, points_per_vehicle - n_ground)
        near = np.hypot(objects[:, 0] - xy[i, 0], objects[:, 1] - xy[i, 1]) <= Config.SENSOR_RANGE_M
        # keep the count exact: far object points are replaced by ground points
        refill = _sample_ground(rng, int((~near).sum()), Config.SENSOR_RANGE_M) + [xy[i, 0], xy[i, 1], 0.0]
        world = np.concatenate([ground, objects[near], refill])
        local = pose.inverse().apply(world).astype(np.float32).astype(np.float64)
        intensity = rng.uniform(0.0, 1.0, len(local)).astype(np.float32).astype(np.float64)
        vehicles.append(Vehicle(i + 1, pose, PointCloud.from_xyz(local, intensity, pose)))

    if ego_id is None:
        ego_id = int(rng.integers(1, n_vehicles + 1))
    return ScenarioFrame(timestamp, ego_id, tuple(vehicles))


def gen_scenario(seed: int, n_frames: int, points_per_vehicle: int = Config.POINTS_PER_VEHICLE) -> List[ScenarioFrame]:
    """
    Independent synthetic frames at the sensor rate, 2 to 7 vehicles each
    :param seed: Scenario seed
    :param n_frames: Number of frames
    :param points_per_vehicle: Points in each vehicle's cloud
    :return: Frames with timestamps 0, 100 ms, 200 ms, ...
    """
    rng = np.random.default_rng(seed)
    counts = rng.integers(Config.MIN_VEHICLES, Config.MAX_VEHICLES + 1, size=n_frames)
    frame_seeds = rng.integers(0, 2 ** 63, size=n_frames)
    return [
        gen_scene(int(s), int(n), points_per_vehicle, i * Config.FRAME_INTERVAL_US)
        for i, (s, n) in enumerate(zip(frame_seeds, counts))
    ]
