"""Differential-drive robot kinematics."""
import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.core.exceptions import CollisionError, InvalidInputError
from src.core.models import Pose2D, RobotState
from src.sim.world import WorldModel


class RobotLimits(BaseModel):
    """Velocity limits of the platform."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    v_max: float = Field(default=0.5, gt=0.0)
    w_max: float = Field(default=1.0, gt=0.0)


def robot_step(
    state: RobotState,
    v_cmd: float,
    w_cmd: float,
    dt: float,
    limits: Optional[RobotLimits] = None,
    world: Optional[WorldModel] = None,
) -> RobotState:
    """
    Integrate unicycle motion over one period with clamped commands.

    The arc is integrated in closed form, so constant commands trace an
    exact circle of radius v/w.

    Args:
        state: Current state (left untouched)
        v_cmd: Linear velocity command in m/s
        w_cmd: Angular velocity command in rad/s
        dt: Period in seconds
        limits: Velocity limits; unlimited when omitted
        world: World to check the new position against

    Returns:
        New state

    Raises:
        CollisionError: If the new position is not in free space
    """
    if not (math.isfinite(dt) and dt > 0):
        raise InvalidInputError(f"Time step must be positive, got {dt!r}")
    if not (math.isfinite(v_cmd) and math.isfinite(w_cmd)):
        raise InvalidInputError("Velocity commands must be finite")
    if limits is not None:
        v_cmd = float(np.clip(v_cmd, -limits.v_max, limits.v_max))
        w_cmd = float(np.clip(w_cmd, -limits.w_max, limits.w_max))

    theta = state.pose.theta
    if abs(w_cmd) < 1e-12:
        dx = v_cmd * dt * math.cos(theta)
        dy = v_cmd * dt * math.sin(theta)
    else:
        radius = v_cmd / w_cmd
        dx = radius * (math.sin(theta + w_cmd * dt) - math.sin(theta))
        dy = -radius * (math.cos(theta + w_cmd * dt) - math.cos(theta))
    pose = Pose2D(state.pose.x + dx, state.pose.y + dy, theta + w_cmd * dt)

    if world is not None and not world.is_free(pose.x, pose.y):
        raise CollisionError(f"Step to ({pose.x:.3f}, {pose.y:.3f}) enters an obstacle")
    return RobotState(pose=pose, v=v_cmd, w=w_cmd)
