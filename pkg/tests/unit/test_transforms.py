"""Tests for homogeneous transforms."""
import math

import numpy as np
import pytest

from src.core.exceptions import InvalidInputError
from src.core.models import Pose2D, TurretAngles
from src.geometry.transforms import (
    Transform2D,
    Transform3D,
    camera_to_turret,
    laser_to_turret,
    rot_z,
    scanner_pose,
)


def test_transform2d_rejects_non_rigid():
    """Test Transform2D rejects scaling, reflection and non-finite entries."""
    with pytest.raises(InvalidInputError):
        Transform2D(np.diag([2.0, 1.0, 1.0]))
    with pytest.raises(InvalidInputError):
        Transform2D(np.diag([1.0, -1.0, 1.0]))
    with pytest.raises(InvalidInputError):
        Transform2D(np.full((3, 3), np.nan))
    with pytest.raises(InvalidInputError):
        Transform2D(np.eye(4))


def test_transform2d_pose_round_trip():
    """Test from_pose and to_pose are inverse."""
    pose = Pose2D(1.0, -2.0, 2.5)
    restored = Transform2D.from_pose(pose).to_pose()

    assert restored.x == pytest.approx(1.0)
    assert restored.y == pytest.approx(-2.0)
    assert restored.theta == pytest.approx(2.5)


def test_transform2d_inverse_and_compose():
    """Test a transform composed with its inverse is the identity."""
    t = Transform2D.from_pose(Pose2D(3.0, 1.0, -0.4))

    np.testing.assert_allclose((t @ t.inverse()).matrix, np.eye(3), atol=1e-12)


def test_transform2d_apply_points():
    """Test apply rotates then translates points."""
    t = Transform2D.from_pose(Pose2D(1.0, 0.0, math.pi / 2))

    np.testing.assert_allclose(t.apply([[1.0, 0.0], [0.0, 2.0]]), [[1.0, 1.0], [-1.0, 0.0]], atol=1e-12)


def test_transform2d_matrix_is_read_only():
    """Test the stored matrix cannot be mutated."""
    t = Transform2D.identity()

    with pytest.raises(ValueError):
        t.matrix[0, 0] = 2.0


def test_transform3d_planar_drops_z():
    """Test planar() keeps the z rotation and the x/y translation."""
    matrix = np.eye(4)
    matrix[:3, :3] = rot_z(0.3)
    matrix[:3, 3] = [1.0, 2.0, 3.0]
    planar = Transform3D(matrix).planar()

    assert planar.angle == pytest.approx(0.3)
    np.testing.assert_allclose(planar.translation, [1.0, 2.0])


def test_laser_to_turret_offset():
    """Test the laser sits offset_y behind the turret axis."""
    t = laser_to_turret(0.1)

    np.testing.assert_allclose(t.translation, [0.0, -0.1, 0.0])
    with pytest.raises(InvalidInputError):
        laser_to_turret(float("inf"))


def test_camera_to_turret_tilt_row():
    """Test the third rotation row is (0, sin tilt, cos tilt)."""
    tilt = math.radians(30.0)
    t = camera_to_turret(TurretAngles(pan=0.7, tilt=tilt))

    np.testing.assert_allclose(t.rotation[2], [0.0, math.sin(tilt), math.cos(tilt)], atol=1e-12)


def test_scanner_pose_applies_mount_offset():
    """Test the scanner pose is shifted along the robot's -y axis."""
    pose = scanner_pose(Pose2D(1.0, 1.0, math.pi / 2), laser_offset_y=0.2)

    assert pose.x == pytest.approx(1.2)
    assert pose.y == pytest.approx(1.0)
    assert pose.theta == pytest.approx(math.pi / 2)


def test_camera_to_turret_entries():
    """Test every rotation entry for a panned and tilted camera."""
    pan, tilt = math.radians(30.0), math.radians(20.0)
    cp, sp, ct, st = math.cos(pan), math.sin(pan), math.cos(tilt), math.sin(tilt)

    t = camera_to_turret(TurretAngles(pan=pan, tilt=tilt))

    expected = np.array([
        [cp, -sp * ct, sp * st],
        [sp, cp * ct, -cp * st],
        [0.0, st, ct],
    ])
    np.testing.assert_allclose(t.rotation, expected, atol=1e-12)
    np.testing.assert_allclose(t.translation, np.zeros(3), atol=1e-12)
    assert t.rotation[0, 1] == pytest.approx(-0.5 * math.cos(math.radians(20.0)))
