"""Homogeneous transforms linking laser, turret, camera, robot and markers."""
import math
from dataclasses import dataclass

import numpy as np

from src.core.exceptions import InvalidInputError
from src.core.models import Pose2D, TurretAngles

RIGID_TOL = 1e-9


def _check_rigid(matrix: np.ndarray, dim: int) -> None:
    if matrix.shape != (dim + 1, dim + 1) or not np.all(np.isfinite(matrix)):
        raise InvalidInputError(f"Expected a finite {dim + 1}x{dim + 1} matrix")
    rotation = matrix[:dim, :dim]
    if not np.allclose(rotation.T @ rotation, np.eye(dim), atol=RIGID_TOL):
        raise InvalidInputError("Rotation block is not orthonormal")
    if abs(np.linalg.det(rotation) - 1.0) > RIGID_TOL:
        raise InvalidInputError("Rotation block must have determinant +1")
    expected_row = np.zeros(dim + 1)
    expected_row[-1] = 1.0
    if not np.allclose(matrix[dim], expected_row, atol=RIGID_TOL):
        raise InvalidInputError("Last row must be homogeneous")


@dataclass(frozen=True, eq=False)
class Transform2D:
    """3x3 homogeneous planar rigid transform."""
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        _check_rigid(matrix, 2)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def identity(cls) -> "Transform2D":
        return cls(np.eye(3))

    @classmethod
    def from_pose(cls, pose: Pose2D) -> "Transform2D":
        c, s = math.cos(pose.theta), math.sin(pose.theta)
        return cls(np.array([[c, -s, pose.x], [s, c, pose.y], [0.0, 0.0, 1.0]]))

    @property
    def rotation(self) -> np.ndarray:
        return self.matrix[:2, :2]

    @property
    def translation(self) -> np.ndarray:
        return self.matrix[:2, 2]

    @property
    def angle(self) -> float:
        return math.atan2(self.matrix[1, 0], self.matrix[0, 0])

    def to_pose(self) -> Pose2D:
        return Pose2D(float(self.matrix[0, 2]), float(self.matrix[1, 2]), self.angle)

    def compose(self, other: "Transform2D") -> "Transform2D":
        return Transform2D(self.matrix @ other.matrix)

    def __matmul__(self, other: "Transform2D") -> "Transform2D":
        return self.compose(other)

    def inverse(self) -> "Transform2D":
        inv = np.eye(3)
        inv[:2, :2] = self.rotation.T
        inv[:2, 2] = -self.rotation.T @ self.translation
        return Transform2D(inv)

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transform an (N, 2) array of points."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return points @ self.rotation.T + self.translation


@dataclass(frozen=True, eq=False)
class Transform3D:
    """4x4 homogeneous spatial rigid transform."""
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        _check_rigid(matrix, 3)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def identity(cls) -> "Transform3D":
        return cls(np.eye(4))

    @property
    def rotation(self) -> np.ndarray:
        return self.matrix[:3, :3]

    @property
    def translation(self) -> np.ndarray:
        return self.matrix[:3, 3]

    def compose(self, other: "Transform3D") -> "Transform3D":
        return Transform3D(self.matrix @ other.matrix)

    def __matmul__(self, other: "Transform3D") -> "Transform3D":
        return self.compose(other)

    def inverse(self) -> "Transform3D":
        inv = np.eye(4)
        inv[:3, :3] = self.rotation.T
        inv[:3, 3] = -self.rotation.T @ self.translation
        return Transform3D(inv)

    def planar(self) -> Transform2D:
        """Drop the vertical axis; valid for transforms rotating about z only."""
        c, s = self.matrix[0, 0], self.matrix[1, 0]
        norm = math.hypot(c, s)
        return Transform2D(np.array([
            [c / norm, -s / norm, self.matrix[0, 3]],
            [s / norm, c / norm, self.matrix[1, 3]],
            [0.0, 0.0, 1.0],
        ]))


def rot_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_x(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def laser_to_turret(offset_y: float) -> Transform3D:
    """Static laser-to-turret-base transform: translation by (0, -offset_y, 0)."""
    if not math.isfinite(offset_y):
        raise InvalidInputError(f"Laser offset must be finite, got {offset_y!r}")
    matrix = np.eye(4)
    matrix[1, 3] = -offset_y
    return Transform3D(matrix)


def camera_to_turret(turret: TurretAngles) -> Transform3D:
    """Camera orientation w.r.t. the turret base: pan about z, then tilt about x.

    Row 3 of the result is (0, sin(tilt), cos(tilt)).
    """
    matrix = np.eye(4)
    matrix[:3, :3] = rot_z(turret.pan) @ rot_x(turret.tilt)
    return Transform3D(matrix)


def robot_to_marker_transform(pose: Pose2D) -> Transform2D:
    """Robot frame expressed in a marker frame, from the robot pose in that frame."""
    return Transform2D.from_pose(pose)


def scanner_pose(robot_pose: Pose2D, laser_offset_y: float = 0.0) -> Pose2D:
    """Global pose of the laser scanner mounted below the turret."""
    mount = laser_to_turret(laser_offset_y).planar()
    return (Transform2D.from_pose(robot_pose) @ mount).to_pose()
