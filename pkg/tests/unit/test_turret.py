"""Tests for the turret servo model."""
import math

import pytest

from src.core.exceptions import InvalidInputError
from src.sim.turret import PidController, PidGains, TurretServo, pid_step, servo_pan_target, turret_step


def test_pid_step_terms():
    """Test proportional, rectangle-integral and backward-difference terms."""
    ctrl = PidController(kp=1.0, ki=1.0, kd=1.0)

    assert pid_step(ctrl, 2.0, 0.5) == pytest.approx(3.0)
    assert pid_step(ctrl, 1.0, 0.5) == pytest.approx(0.5)


def test_pid_step_rejects_bad_input():
    """Test non-finite error and non-positive period are rejected."""
    with pytest.raises(InvalidInputError):
        pid_step(PidController(), float("nan"), 0.1)
    with pytest.raises(InvalidInputError):
        pid_step(PidController(), 1.0, 0.0)


@pytest.mark.parametrize(
    "command, expected",
    [(180.0, 180.0), (370.0, 10.0), (5.0, 10.0), (355.0, 350.0), (-10.0, 350.0)],
)
def test_servo_pan_target(command, expected):
    """Test pan commands wrap past 360 and stop at the dead zone."""
    assert servo_pan_target(command) == pytest.approx(expected)


def test_servo_home_looks_forward():
    """Test the home position is zero robot-relative pan."""
    servo = TurretServo()

    assert servo.angles.pan == pytest.approx(0.0)
    assert servo.angles.tilt == pytest.approx(0.0)


def test_servo_command_uses_offset():
    """Test robot-relative pan maps to servo pan + 180 deg."""
    servo = TurretServo()
    servo.command(math.pi / 2)

    assert servo.target_pan == pytest.approx(270.0)
    servo.command(-math.pi / 2, tilt=math.radians(100.0))
    assert servo.target_pan == pytest.approx(90.0)
    assert servo.target_tilt == pytest.approx(90.0)


def test_turret_step_converges():
    """Test proportional control approaches the target geometrically."""
    servo = TurretServo()
    servo.command(math.pi / 2)

    turret_step(servo, 0.1)
    assert servo.pan == pytest.approx(180.0 + 0.7 * 90.0)
    for _ in range(30):
        turret_step(servo, 0.1)
    assert servo.settled(0.01)
    assert servo.angles.pan == pytest.approx(math.pi / 2, abs=1e-3)


def test_turret_step_rate_limit():
    """Test the slew rate cap bounds each step."""
    servo = TurretServo(gains=PidGains(max_rate_deg_s=30.0))
    servo.command(math.pi / 2)
    turret_step(servo, 0.1)

    assert servo.pan == pytest.approx(183.0)


def test_snap_pan_and_reset():
    """Test snapping moves at once and reset returns home."""
    servo = TurretServo()
    servo.snap_pan(-math.pi / 4)

    assert servo.pan == pytest.approx(135.0)
    servo.reset()
    assert servo.target_pan == pytest.approx(180.0)


def test_servo_units_endpoints():
    """Test servo degrees map linearly onto servo units."""
    assert TurretServo(pan=10.0, tilt=-70.0).servo_units() == (100, 1248)
    assert TurretServo(pan=350.0, tilt=90.0).servo_units() == (3980, 3072)


@pytest.mark.parametrize("target", [math.radians(-150.0), -0.3, 0.05, math.radians(120.0)])
def test_turret_step_never_overshoots(target):
    """Test the pan error keeps its sign while the turret approaches the target."""
    servo = TurretServo()
    servo.command(target)
    sign = math.copysign(1.0, servo.pan_error())

    for _ in range(60):
        turret_step(servo, 1.0 / 30.0)
        assert sign * servo.pan_error() >= 0.0
    assert servo.settled(0.01)
