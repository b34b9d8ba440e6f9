"""Tests for robot kinematics."""
import math

import pytest

from src.core.exceptions import CollisionError, InvalidInputError
from src.core.models import Pose2D, RobotState
from src.sim.robot import RobotLimits, robot_step
from src.sim.worlds import room


def test_robot_step_straight():
    """Test zero angular velocity moves along the heading."""
    state = robot_step(RobotState(Pose2D(0.0, 0.0, math.pi / 2)), 0.5, 0.0, 2.0)

    assert state.pose.x == pytest.approx(0.0, abs=1e-12)
    assert state.pose.y == pytest.approx(1.0)


def test_robot_step_exact_arc():
    """Test constant commands follow a circle of radius v/w."""
    state = robot_step(RobotState(Pose2D(0.0, 0.0, 0.0)), 1.0, math.pi / 2, 1.0)

    assert state.pose.x == pytest.approx(2.0 / math.pi)
    assert state.pose.y == pytest.approx(2.0 / math.pi)
    assert state.pose.theta == pytest.approx(math.pi / 2)


def test_robot_step_clamps_commands():
    """Test commands are clipped to the limits."""
    state = robot_step(RobotState(Pose2D(0.0, 0.0)), 2.0, -3.0, 0.1, RobotLimits(v_max=0.5, w_max=1.0))

    assert state.v == 0.5
    assert state.w == -1.0


def test_robot_step_rejects_bad_period():
    """Test the period must be positive."""
    with pytest.raises(InvalidInputError):
        robot_step(RobotState(Pose2D(0.0, 0.0)), 0.1, 0.0, 0.0)
    with pytest.raises(InvalidInputError):
        robot_step(RobotState(Pose2D(0.0, 0.0)), float("inf"), 0.0, 0.1)


def test_robot_step_collision():
    """Test moving into a wall raises CollisionError."""
    world = room().world

    with pytest.raises(CollisionError):
        robot_step(RobotState(Pose2D(3.4, 1.0, 0.0)), 0.5, 0.0, 1.0, world=world)
