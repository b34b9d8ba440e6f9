"""Nearest-marker tracking with hysteresis and pose smoothing."""
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Mapping, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.stats import circmean

from src.core.exceptions import InvalidInputError, UnknownMarkerError
from src.core.models import Marker, Pose2D, wrap_angle
from src.sim.turret import TurretServo

logger = logging.getLogger("markernav")


class TrackerConfig(BaseModel):
    """Marker tracker parameters."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    hysteresis_m: float = Field(default=0.20, ge=0.0)
    window: int = Field(default=5, ge=1)


@dataclass
class TrackerState:
    """Tracked marker and the sliding window of recent fixes."""

    config: TrackerConfig = field(default_factory=TrackerConfig)
    tracked_id: Optional[int] = None
    fixes: Deque[Pose2D] = field(default_factory=deque)
    smoothed: Optional[Pose2D] = None

    def __post_init__(self):
        self.fixes = deque(self.fixes, maxlen=self.config.window)


def nearest_marker(pose: Pose2D, database: Mapping[int, Marker]) -> int:
    """Id of the marker closest to the pose; ties go to the lowest id."""
    if not database:
        raise InvalidInputError("Marker database is empty")
    return min(database, key=lambda marker_id: (pose.distance_to(database[marker_id].pose), marker_id))


def pan_to_marker(pose: Pose2D, marker: Marker) -> float:
    """Robot-relative pan that points the camera at a marker."""
    dx, dy = marker.pose.x - pose.x, marker.pose.y - pose.y
    if dx == 0.0 and dy == 0.0:
        raise InvalidInputError(f"Robot stands on marker {marker.id}")
    return wrap_angle(math.atan2(dy, dx) - pose.theta)


def switch_decision(
    state: TrackerState,
    pose: Pose2D,
    database: Mapping[int, Marker],
    servo: Optional[TurretServo] = None,
) -> int:
    """
    Apply the hysteresis rule and return the marker to track.

    A rival replaces the tracked marker only when it is closer by at least
    the hysteresis margin. On a switch the turret, if given, is commanded
    toward the new marker.
    """
    rival = nearest_marker(pose, database)
    current = state.tracked_id
    if current is not None and current not in database:
        raise UnknownMarkerError(current)
    if current is None:
        chosen = rival
    elif rival != current:
        margin = pose.distance_to(database[current].pose) - pose.distance_to(database[rival].pose)
        chosen = rival if margin >= state.config.hysteresis_m - 1e-12 else current
    else:
        chosen = current

    if chosen != current:
        logger.info(f"Tracking marker {chosen} (was {current})")
        state.tracked_id = chosen
        if servo is not None:
            servo.command(pan_to_marker(pose, database[chosen]))
    return chosen


def smooth_fix(state: TrackerState, fix: Pose2D) -> Pose2D:
    """Moving average over the last fixes: arithmetic for x, y, circular for theta."""
    state.fixes.append(fix)
    xs = np.array([p.x for p in state.fixes])
    ys = np.array([p.y for p in state.fixes])
    thetas = np.array([p.theta for p in state.fixes])
    state.smoothed = Pose2D(
        float(xs.mean()),
        float(ys.mean()),
        float(circmean(thetas, high=math.pi, low=-math.pi)),
    )
    return state.smoothed
