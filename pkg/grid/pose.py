"""
Rigid Poses
Rotation + translation with composition, inversion and point mapping
"""

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

ORTHONORMAL_TOLERANCE = 1e-9
# Rotations that went through float32 (wire format) only keep ~7 digits
WIRE_TOLERANCE = 1e-6


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Pose:
    """
    Rigid transform p_A = R p_B + t mapping frame B into frame A
    rotation is a 3x3 orthonormal matrix with det +1, translation is in meters
    """

    rotation: np.ndarray
    translation: np.ndarray
    tolerance: float = field(default=ORTHONORMAL_TOLERANCE, repr=False)

    def __post_init__(self):
        rotation = _frozen(self.rotation)
        translation = _frozen(self.translation).reshape(-1)
        if rotation.shape != (3, 3) or translation.shape != (3,):
            raise ValueError(f"Pose needs a 3x3 rotation and a 3-vector, got {rotation.shape} / {translation.shape}")
        if not (np.isfinite(rotation).all() and np.isfinite(translation).all()):
            raise ValueError("Pose contains non-finite values")
        gram_error = np.abs(rotation @ rotation.T - np.eye(3)).max()
        det = np.linalg.det(rotation)
        if gram_error > self.tolerance or abs(det - 1.0) > self.tolerance:
            raise ValueError(f"Rotation is not orthonormal with det +1 (error {gram_error:.3g}, det {det:.12g})")
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    @classmethod
    def identity(cls) -> "Pose":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_euler(cls, roll: float, pitch: float, yaw: float, translation: Sequence[float] = (0.0, 0.0, 0.0)) -> "Pose":
        """
        Build a pose from roll/pitch/yaw (radians, applied x then y then z)
        :param roll: Rotation about x
        :param pitch: Rotation about y
        :param yaw: Rotation about z
        :param translation: 3-vector in meters
        :return: Pose
        """
        cr, sr = math.cos(roll), math.sin(roll)
        cp, sp = math.cos(pitch), math.sin(pitch)
        cy, sy = math.cos(yaw), math.sin(yaw)
        rx = np.array([[1, 0, 0], [0, cr, -sr], [0, sr, cr]])
        ry = np.array([[cp, 0, sp], [0, 1, 0], [-sp, 0, cp]])
        rz = np.array([[cy, -sy, 0], [sy, cy, 0], [0, 0, 1]])
        return cls(rz @ ry @ rx, np.asarray(translation, dtype=np.float64))

    @classmethod
    def from_wire(cls, values: Sequence[float]) -> "Pose":
        """
        Rebuild a pose from 12 floats (rotation row-major, then translation)
        :param values: 12 numbers, usually float32 from the wire
        :return: Pose validated at float32 tolerance
        """
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (12,):
            raise ValueError(f"Wire pose needs 12 values, got {values.shape}")
        return cls(values[:9].reshape(3, 3), values[9:], tolerance=WIRE_TOLERANCE)

    def to_wire(self) -> np.ndarray:
        """12 values: rotation row-major followed by translation"""
        return np.concatenate([self.rotation.reshape(-1), self.translation])

    def quantized(self) -> "Pose":
        """Copy rounded to float32 precision, exactly what survives the wire"""
        return Pose.from_wire(self.to_wire().astype(np.float32))

    def compose(self, other: "Pose") -> "Pose":
        """self ∘ other: apply other first, then self"""
        return Pose(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
            tolerance=max(self.tolerance, other.tolerance),
        )

    def inverse(self) -> "Pose":
        rotation_t = self.rotation.T
        return Pose(rotation_t, -(rotation_t @ self.translation), tolerance=self.tolerance)

    def relative_to(self, ego: "Pose") -> "Pose":
        """Transform mapping points of this frame into the ego frame"""
        return ego.inverse().compose(self)

    def apply(self, xyz: np.ndarray) -> np.ndarray:
        """
        Map an (N, 3) array of points: rotation then translation
        :param xyz: Points in the source frame
        :return: Points in the target frame
        """
        xyz = np.asarray(xyz, dtype=np.float64).reshape(-1, 3)
        return xyz @ self.rotation.T + self.translation

    def planar_distance(self, other: "Pose") -> float:
        """Euclidean x-y distance between the two translations"""
        dx, dy = self.translation[:2] - other.translation[:2]
        return math.hypot(dx, dy)

    def allclose(self, other: "Pose", atol: float = 1e-9) -> bool:
        return bool(
            np.allclose(self.rotation, other.rotation, rtol=0.0, atol=atol)
            and np.allclose(self.translation, other.translation, rtol=0.0, atol=atol)
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pose):
            return NotImplemented
        return bool(np.array_equal(self.rotation, other.rotation) and np.array_equal(self.translation, other.translation))

    def __hash__(self):
        return hash((self.rotation.tobytes(), self.translation.tobytes()))
