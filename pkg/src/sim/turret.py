"""Pan-tilt turret servo model with per-axis PID control.

Servo pan angles are robot-relative pan + 180 deg, so the 20 deg dead zone
of the pan servo sits behind the robot. All servo quantities are degrees.
"""
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.core.exceptions import InvalidInputError
from src.core.models import TurretAngles

PAN_SERVO_LIMITS = (10.0, 350.0)
TILT_LIMITS = (-70.0, 90.0)
PAN_UNITS = (100, 3980)
TILT_UNITS = (1248, 3072)
PAN_SERVO_OFFSET = 180.0


class PidGains(BaseModel):
    """Turret controller gains and plant limits."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kp: float = Field(default=0.7, ge=0.0)
    ki: float = Field(default=0.0, ge=0.0)
    kd: float = Field(default=0.0, ge=0.0)
    max_rate_deg_s: Optional[float] = Field(default=None, gt=0.0)


@dataclass
class PidController:
    """Discrete PID controller state."""

    kp: float = 0.7
    ki: float = 0.0
    kd: float = 0.0
    integral: float = 0.0
    prev_error: Optional[float] = None

    @classmethod
    def from_gains(cls, gains: PidGains) -> "PidController":
        return cls(kp=gains.kp, ki=gains.ki, kd=gains.kd)

    def reset(self) -> None:
        self.integral = 0.0
        self.prev_error = None


def pid_step(ctrl: PidController, error: float, dt: float) -> float:
    """
    Advance the controller by one sample.

    The integral is a rectangle sum; the derivative is a backward
    difference and zero on the first sample.

    Args:
        ctrl: Controller, updated in place
        error: Current error
        dt: Sample period in seconds

    Returns:
        Control signal u = kp*e + ki*sum(e*dt) + kd*de/dt
    """
    if not math.isfinite(error):
        raise InvalidInputError(f"PID error must be finite, got {error!r}")
    if not (math.isfinite(dt) and dt > 0):
        raise InvalidInputError(f"PID period must be positive, got {dt!r}")
    ctrl.integral += error * dt
    derivative = 0.0 if ctrl.prev_error is None else (error - ctrl.prev_error) / dt
    ctrl.prev_error = error
    return ctrl.kp * error + ctrl.ki * ctrl.integral + ctrl.kd * derivative


def servo_pan_target(pan_servo_deg: float) -> float:
    """Map a pan command in servo degrees into the reachable range.

    Commands past 350 deg wrap (370 becomes 10) so the turret turns the other
    way round; commands inside the dead zone stop at the nearest limit.
    """
    lo, hi = PAN_SERVO_LIMITS
    return float(np.clip(pan_servo_deg % 360.0, lo, hi))


def _to_units(value: float, limits: Tuple[float, float], units: Tuple[int, int]) -> int:
    fraction = (value - limits[0]) / (limits[1] - limits[0])
    return int(round(units[0] + fraction * (units[1] - units[0])))


@dataclass
class TurretServo:
    """Pan-tilt servo pair; angles in servo degrees."""

    pan: float = PAN_SERVO_OFFSET
    tilt: float = 0.0
    target_pan: float = PAN_SERVO_OFFSET
    target_tilt: float = 0.0
    gains: PidGains = field(default_factory=PidGains)
    pan_pid: PidController = field(init=False)
    tilt_pid: PidController = field(init=False)

    def __post_init__(self):
        self.pan_pid = PidController.from_gains(self.gains)
        self.tilt_pid = PidController.from_gains(self.gains)
        self.pan = servo_pan_target(self.pan)
        self.tilt = float(np.clip(self.tilt, *TILT_LIMITS))
        self.target_pan = servo_pan_target(self.target_pan)
        self.target_tilt = float(np.clip(self.target_tilt, *TILT_LIMITS))

    @property
    def angles(self) -> TurretAngles:
        """Current robot-relative turret angles in radians."""
        return TurretAngles(
            pan=math.radians(self.pan - PAN_SERVO_OFFSET),
            tilt=math.radians(self.tilt),
        )

    def command_servo(self, pan_deg: float, tilt_deg: Optional[float] = None) -> None:
        """Set targets in servo degrees (pan wraps, tilt clamps)."""
        self.target_pan = servo_pan_target(pan_deg)
        if tilt_deg is not None:
            self.target_tilt = float(np.clip(tilt_deg, *TILT_LIMITS))

    def command(self, pan: float, tilt: Optional[float] = None) -> None:
        """Set targets from robot-relative angles in radians."""
        pan_deg = math.degrees(math.remainder(pan, 2 * math.pi)) + PAN_SERVO_OFFSET
        self.command_servo(pan_deg, None if tilt is None else math.degrees(tilt))

    def pan_error(self) -> float:
        return self.target_pan - self.pan

    def settled(self, tolerance_deg: float) -> bool:
        return abs(self.pan_error()) <= tolerance_deg and abs(self.target_tilt - self.tilt) <= tolerance_deg

    def servo_units(self) -> Tuple[int, int]:
        """Raw (pan, tilt) positions in servo units."""
        return (
            _to_units(self.pan, PAN_SERVO_LIMITS, PAN_UNITS),
            _to_units(self.tilt, TILT_LIMITS, TILT_UNITS),
        )

    def reset(self) -> None:
        """Return to the forward-looking home position."""
        self.command_servo(PAN_SERVO_OFFSET, 0.0)
        self.pan_pid.reset()
        self.tilt_pid.reset()

    def snap_pan(self, pan: float) -> None:
        """Manual override: jump straight to a robot-relative pan."""
        self.command(pan)
        self.pan = self.target_pan
        self.pan_pid.reset()


def turret_step(servo: TurretServo, dt: float) -> TurretServo:
    """
    Move both axes one control period toward their targets.

    Args:
        servo: Turret, updated in place
        dt: Control period in seconds

    Returns:
        The updated turret
    """
    for axis, pid, limits in (
        ("pan", servo.pan_pid, PAN_SERVO_LIMITS),
        ("tilt", servo.tilt_pid, TILT_LIMITS),
    ):
        current = getattr(servo, axis)
        error = getattr(servo, f"target_{axis}") - current
        u = pid_step(pid, error, dt)
        if servo.gains.max_rate_deg_s is not None:
            cap = servo.gains.max_rate_deg_s * dt
            u = float(np.clip(u, -cap, cap))
        setattr(servo, axis, float(np.clip(current + u, *limits)))
    return servo
