import os

import numpy as np
import pytest

from backbone import init_weights
from core import golden
from grid import GridSpec, Level, PointCloud, canonical_specs

# High 128x64x40, Medium 64x32x20, Low 32x16x10; block 4 of every stream at 16x8x5
TEST_EXTENT = (6.4, 3.2, 4.0)
TEST_ORIGIN = (-3.2, -1.6, -3.0)

GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "golden")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def test_specs():
    return canonical_specs(TEST_EXTENT, TEST_ORIGIN)


@pytest.fixture(scope="session")
def weights():
    return init_weights(42)


def random_cloud(rng, n, extent=TEST_EXTENT, origin=TEST_ORIGIN, margin=0.0):
    """Points spread over (slightly beyond, with margin) the test volume"""
    low = np.asarray(origin) - margin
    high = np.asarray(origin) + np.asarray(extent) + margin
    xyz = rng.uniform(low, high, size=(n, 3))
    return PointCloud.from_xyz(xyz, rng.uniform(0.0, 1.0, n))


def golden_path(name):
    """Committed artifact, or a seeded one generated on first use of a fresh checkout"""
    path = os.path.join(GOLDEN_DIR, name)
    if not os.path.exists(path) and name in golden.SEEDED_ARTIFACTS:
        golden.bless(GOLDEN_DIR, [name])
    if not os.path.exists(path):
        pytest.fail(f"golden artifact {name} is missing from {GOLDEN_DIR}")
    return path


@pytest.fixture
def unit_spec():
    return GridSpec((0.0, 0.0, 0.0), (0.05, 0.05, 0.10), (20, 20, 10), Level.HIGH)
