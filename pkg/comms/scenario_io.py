"""
Scenario Directories
scenario.txt (frame lines + one pose row per vehicle) next to the referenced PCF1 clouds
"""

import os
from typing import List, Sequence

import numpy as np

from core.errors import CodecError, ScenarioError
from core.log import get_logger
from grid import Pose, read_pcf, write_pcf
from .scenario import ScenarioFrame, Vehicle

logger = get_logger(__name__)

SCENARIO_FILE = "scenario.txt"
HEADER = "# voxellink scenario v1"


def write_scenario(frames: Sequence[ScenarioFrame], directory: str) -> str:
    """
    Write frames as a scenario directory
    :param frames: Frames to store
    :param directory: Target directory (created if missing)
    :return: Path of scenario.txt
    """
    os.makedirs(directory, exist_ok=True)
    lines = [HEADER, "# frame <timestamp_us> <ego_id> <vehicles>", "# <id> <r00..r22> <tx ty tz> <cloud.pcf>"]
    for index, frame in enumerate(frames):
        lines.append(f"frame {frame.timestamp} {frame.ego_id} {len(frame.vehicles)}")
        for v in frame.vehicles:
            name = f"f{index:05d}_v{v.vehicle_id}.pcf"
            write_pcf(v.cloud, os.path.join(directory, name))
            pose = " ".join(repr(float(x)) for x in v.pose.to_wire())
            lines.append(f"{v.vehicle_id} {pose} {name}")
    path = os.path.join(directory, SCENARIO_FILE)
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    logger.debug("wrote %d frames to %s", len(frames), directory)
    return path


def _pose(fields: List[str], where: str) -> Pose:
    try:
        values = np.array([float(x) for x in fields], dtype=np.float64)
        return Pose(values[:9].reshape(3, 3), values[9:])
    except ValueError as e:
        raise ScenarioError(f"{where}: bad pose ({e})") from None


def read_scenario(path: str) -> List[ScenarioFrame]:
    """
    Load a scenario directory (or its scenario.txt)
    :param path: Directory or file path
    :return: Frames in file order
    """
    if os.path.isdir(path):
        path = os.path.join(path, SCENARIO_FILE)
    base = os.path.dirname(path)
    with open(path, "r", encoding="utf-8") as f:
        rows = [(n, line.split()) for n, line in enumerate(f, 1) if line.strip() and not line.lstrip().startswith("#")]

    frames: List[ScenarioFrame] = []
    i = 0
    while i < len(rows):
        lineno, fields = rows[i]
        where = f"{path}:{lineno}"
        if fields[0] != "frame" or len(fields) != 4:
            raise ScenarioError(f"{where}: expected 'frame <timestamp> <ego_id> <vehicles>'")
        try:
            timestamp, ego_id, count = (int(x) for x in fields[1:])
        except ValueError:
            raise ScenarioError(f"{where}: frame fields must be integers") from None
        vehicles = []
        for lineno, row in rows[i + 1:i + 1 + count]:
            where = f"{path}:{lineno}"
            if len(row) != 14:
                raise ScenarioError(f"{where}: expected id, 12 pose values and a cloud file")
            pose = _pose(row[1:13], where)
            try:
                cloud = read_pcf(os.path.join(base, row[13]), frame_pose=pose)
            except CodecError as e:
                raise ScenarioError(f"{where}: {row[13]}: {e}") from None
            vehicles.append(Vehicle(int(row[0]), pose, cloud))
        if len(vehicles) != count:
            raise ScenarioError(f"{where}: frame declares {count} vehicles, found {len(vehicles)}")
        frames.append(ScenarioFrame(timestamp, ego_id, tuple(vehicles)))
        i += 1 + count
    return frames
