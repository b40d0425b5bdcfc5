import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grid import Pose

angles = st.floats(-math.pi, math.pi, allow_nan=False)
coords = st.floats(-200.0, 200.0, allow_nan=False)


@st.composite
def poses(draw):
    return Pose.from_euler(draw(angles), draw(angles), draw(angles), (draw(coords), draw(coords), draw(coords)))


def test_identity_maps_points_to_themselves():
    xyz = np.array([[1.0, 2.0, 3.0], [-4.0, 0.5, 0.0]])
    assert np.array_equal(Pose.identity().apply(xyz), xyz)


def test_rejects_non_orthonormal_rotation():
    with pytest.raises(ValueError):
        Pose(np.diag([1.0, 1.0, 1.1]), np.zeros(3))


def test_rejects_reflection():
    with pytest.raises(ValueError):
        Pose(np.diag([1.0, 1.0, -1.0]), np.zeros(3))


def test_rejects_non_finite_translation():
    with pytest.raises(ValueError):
        Pose(np.eye(3), [0.0, math.inf, 0.0])


def test_yaw_quarter_turn():
    pose = Pose.from_euler(0.0, 0.0, math.pi / 2, (1.0, 0.0, 0.0))
    assert np.allclose(pose.apply([[1.0, 0.0, 0.0]]), [[1.0, 1.0, 0.0]], atol=1e-12)


@given(poses())
@settings(max_examples=200)
def test_compose_with_inverse_is_identity(p):
    assert p.compose(p.inverse()).allclose(Pose.identity(), atol=1e-9)
    assert p.inverse().compose(p).allclose(Pose.identity(), atol=1e-9)


@given(poses(), poses(), poses())
@settings(max_examples=100)
def test_compose_is_associative(a, b, c):
    assert a.compose(b).compose(c).allclose(a.compose(b.compose(c)), atol=1e-9)


@given(poses(), poses())
@settings(max_examples=100)
def test_relative_pose_maps_sender_points_into_ego_frame(sender, ego):
    local = np.array([[3.0, -2.0, 0.5], [10.0, 4.0, -1.0]])
    world = sender.apply(local)
    in_ego = ego.inverse().apply(world)
    assert np.allclose(sender.relative_to(ego).apply(local), in_ego, atol=1e-9)


@given(poses())
@settings(max_examples=100)
def test_quantized_pose_survives_wire_round_trip(p):
    q = p.quantized()
    assert Pose.from_wire(q.to_wire().astype(np.float32)) == q
    assert q.allclose(p, atol=1e-4)


def test_from_wire_needs_twelve_values():
    with pytest.raises(ValueError):
        Pose.from_wire([0.0] * 11)


def test_planar_distance_ignores_height():
    a = Pose.identity()
    b = Pose(np.eye(3), [3.0, 4.0, 100.0])
    assert a.planar_distance(b) == 5.0
    assert b.planar_distance(a) == 5.0
