"""
Golden Artifacts
Byte-stable reference outputs, regenerated only on an explicit bless
"""

import hashlib
import os
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

from backbone import encode_weights, forward, init_weights
from backbone.bev import encode_bev
from codec import CodecMode, Sublayout, VoxelGridMessage, encode, make_message
from comms import ChannelConfig, gen_scenario, gen_scene, simulate
from grid import GridSpec, Level, Pose, SparseVoxelGrid, canonical_specs, encode_pcf, voxelize
from strategies import UniformStrategy
from .config import Config
from .log import get_logger
from .reporter import Reporter

logger = get_logger(__name__)

GOLDEN_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "tests", "golden")

CLOUD_SEED = 7
CLOUD_POINTS = 4_000
SIM_SEED = 1
SIM_FRAMES = 100
SIM_POINTS = 8_000


def golden_cloud():
    """Ego cloud of the seed-7 synthetic scene"""
    return gen_scene(CLOUD_SEED, 2, CLOUD_POINTS).ego.cloud


def _cloud() -> bytes:
    return encode_pcf(golden_cloud())


# Hand-derived corpus: no random numbers involved, committed byte for byte
HANDMADE_SPEC = GridSpec((-140.0, -40.0, -3.0), (0.2, 0.2, 0.4), (1400, 400, 10), Level.LOW)
HANDMADE_POSE = Pose(np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]), (12.5, -3.25, 0.75))
HANDMADE_COORDS = ((0, 0, 0), (700, 200, 5), (1399, 399, 9))
HANDMADE_MEANS = (
    (-139.875, -39.875, -2.75, 0.5),
    (0.125, 0.125, -0.875, 0.25),
    (139.875, 39.875, 0.75, 1.0),
)


def handmade_message(mode: CodecMode = CodecMode.COORDS_ONLY) -> VoxelGridMessage:
    """Sender 7 at t=1 s, three Low voxels at the corners and centre of the canonical volume"""
    grid = SparseVoxelGrid(HANDMADE_SPEC, HANDMADE_COORDS, np.array(HANDMADE_MEANS))
    return make_message(7, 1_000_000, HANDMADE_POSE, grid, mode)


def _handmade(mode: CodecMode, sublayout: Sublayout) -> Callable[[], bytes]:
    return lambda: encode(handmade_message(mode), mode, sublayout)


def _low_message() -> bytes:
    grid = voxelize(golden_cloud(), GridSpec.canonical(Level.LOW))
    return encode(make_message(0, 0, Pose.identity(), grid, CodecMode.COORDS_ONLY),
                  CodecMode.COORDS_ONLY, Sublayout.COMPAT)


def _weights() -> bytes:
    return encode_weights(init_weights(Config.DEFAULT_SEED))


def simulate_report() -> bytes:
    report = simulate(gen_scenario(SIM_SEED, SIM_FRAMES, SIM_POINTS), ChannelConfig(),
                      UniformStrategy(Config.DEFAULT_SEED))
    return Reporter.format_text(report.summary()).encode("utf-8")


def forward_digest() -> bytes:
    specs = canonical_specs(Config.REDUCED_EXTENT, Config.REDUCED_ORIGIN)
    bev = forward(golden_cloud(), [], init_weights(Config.DEFAULT_SEED), specs)
    return (hashlib.sha256(encode_bev(bev)).hexdigest() + "\n").encode("ascii")


# committed to tests/golden/ and never regenerated as a side effect
HANDMADE_ARTIFACTS: Dict[str, Callable[[], bytes]] = {
    "handmade_low_compat.svg": _handmade(CodecMode.COORDS_ONLY, Sublayout.COMPAT),
    "handmade_low_packed.svg": _handmade(CodecMode.COORDS_ONLY, Sublayout.PACKED),
    "handmade_low_mean.svg": _handmade(CodecMode.COORDS_PLUS_MEAN, Sublayout.COMPAT),
}

# derived from fixed seeds at build time
SEEDED_ARTIFACTS: Dict[str, Callable[[], bytes]] = {
    "cloud_seed7.pcf": _cloud,
    "cloud_seed7_low.svg": _low_message,
    "weights_seed42.mrw": _weights,
    "simulate_seed1_uniform.txt": simulate_report,
    "forward_reduced_seed42.sha256": forward_digest,
}

ARTIFACTS: Dict[str, Callable[[], bytes]] = {**HANDMADE_ARTIFACTS, **SEEDED_ARTIFACTS}


def bless(directory: str = GOLDEN_DIR, names: Optional[Iterable[str]] = None) -> List[Tuple[str, int]]:
    """
    Regenerate artifacts
    :param directory: Golden directory
    :param names: Artifacts to write (all by default)
    :return: (name, bytes written) per artifact
    """
    os.makedirs(directory, exist_ok=True)
    written = []
    for name in (ARTIFACTS if names is None else names):
        data = ARTIFACTS[name]()
        with open(os.path.join(directory, name), "wb") as f:
            f.write(data)
        logger.debug("blessed %s (%d bytes)", name, len(data))
        written.append((name, len(data)))
    return written


def verify(directory: str = GOLDEN_DIR) -> List[Tuple[str, str]]:
    """
    Compare fresh artifacts against the blessed files
    :param directory: Golden directory
    :return: (name, 'ok' | 'missing' | 'mismatch') per artifact
    """
    results = []
    for name, build in ARTIFACTS.items():
        path = os.path.join(directory, name)
        if not os.path.exists(path):
            results.append((name, "missing"))
            continue
        with open(path, "rb") as f:
            results.append((name, "ok" if f.read() == build() else "mismatch"))
    return results
