"""Autonomous navigation loop driven by marker localization."""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.core.exceptions import InvalidInputError, LocalizationLostError
from src.core.models import (
    MarkerDatabase,
    Pose2D,
    RobotState,
    TrackingState,
    Trajectory,
    TrajectorySample,
)
from src.geometry.localization import robot_pose_from_marker
from src.navigation.control import PathFollower, PurePursuitConfig, cross_track_error
from src.navigation.tracker import (
    TrackerConfig,
    TrackerState,
    pan_to_marker,
    smooth_fix,
    switch_decision,
)
from src.sim.detection import DetectionSpec, detections_by_id, simulate_marker_detection
from src.sim.robot import RobotLimits, robot_step
from src.sim.turret import PidGains, TurretServo, turret_step
from src.sim.world import WorldModel

logger = logging.getLogger("markernav")


class LoopConfig(BaseModel):
    """Timing of the control loop."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    rate_hz: float = Field(default=30.0, gt=0.0)
    dead_reckoning_s: float = Field(default=1.0, ge=0.0)
    max_duration_s: float = Field(default=600.0, gt=0.0)

    @property
    def dt(self) -> float:
        return 1.0 / self.rate_hz


@dataclass
class PoseEstimator:
    """Marker fixes with moving-average smoothing and dead reckoning between them."""

    database: MarkerDatabase
    tracker: TrackerState
    estimate: Pose2D
    horizon_s: float = 1.0
    last_fix_t: float = 0.0
    raw: Optional[Pose2D] = None

    def update(self, t: float, detections, previous_command=(0.0, 0.0), dt: float = 0.0) -> str:
        """
        Fold one frame of detections into the estimate.

        Returns:
            Sample kind of the new estimate: ``smoothed`` or ``dead_reckoned``

        Raises:
            LocalizationLostError: If no fix arrived within the horizon
        """
        self.raw = None
        tracked = detections_by_id(detections).get(self.tracker.tracked_id)
        if tracked is not None and tracked.state is TrackingState.TRACKED_WITH_POSE:
            self.raw = robot_pose_from_marker(
                tracked.observation, tracked.turret, tracked.marker_id, self.database, face=tracked.face
            )
            self.estimate = smooth_fix(self.tracker, self.raw)
            self.last_fix_t = t
            return "smoothed"

        if t - self.last_fix_t > self.horizon_s + 1e-9:
            raise LocalizationLostError(
                f"No fix from marker {self.tracker.tracked_id} for {t - self.last_fix_t:.2f} s"
            )
        if dt > 0:
            v, w = previous_command
            self.estimate = robot_step(RobotState(self.estimate), v, w, dt).pose
        return "dead_reckoned"


@dataclass
class NavigationResult:
    """Logged run of the navigator."""

    trajectory: Trajectory
    path: np.ndarray
    cross_track: List[float] = field(default_factory=list)
    reached: bool = False
    duration_s: float = 0.0
    switches: int = 0

    @property
    def max_cross_track(self) -> float:
        return max(self.cross_track, default=0.0)

    def final_pose(self) -> Optional[Pose2D]:
        truth = self.trajectory.of_kind("truth")
        return truth[-1].pose if truth else None


class Navigator:
    """Follows a waypoint path using marker fixes as feedback."""

    def __init__(
        self,
        world: WorldModel,
        database: MarkerDatabase,
        detection: DetectionSpec = DetectionSpec(),
        tracker: TrackerConfig = TrackerConfig(),
        pursuit: PurePursuitConfig = PurePursuitConfig(),
        limits: RobotLimits = RobotLimits(),
        gains: PidGains = PidGains(),
        loop: LoopConfig = LoopConfig(),
        seed: int = 0,
    ):
        """
        Initialize navigator.

        Args:
            world: Ground-truth world the robot moves in
            database: Installed marker poses used for localization
            detection: Detector parameters
            tracker: Hysteresis and smoothing parameters
            pursuit: Path-following parameters
            limits: Platform velocity limits
            gains: Turret servo gains
            loop: Control-loop timing
            seed: Base seed; frame k uses ``seed + k``
        """
        if not len(database):
            raise InvalidInputError("Navigation needs at least one marker")
        self.world = world
        self.database = database
        self.detection = detection
        self.tracker_config = tracker
        self.pursuit = pursuit
        self.limits = limits
        self.gains = gains
        self.loop = loop
        self.seed = seed

    def run(self, start: Pose2D, waypoints: Sequence[Pose2D]) -> NavigationResult:
        """
        Drive from a known start pose through the waypoints.

        Args:
            start: True (and initially known) robot pose
            waypoints: Waypoints to visit in order

        Returns:
            Trajectory log with truth, raw, smoothed and dead-reckoned samples

        Raises:
            LocalizationLostError: If marker fixes stop for longer than the horizon
            CollisionError: If the robot leaves free space
        """
        dt = self.loop.dt
        follower = PathFollower(list(waypoints), self.pursuit)
        path = np.array([[start.x, start.y]] + [[p.x, p.y] for p in waypoints])
        tracker = TrackerState(self.tracker_config)
        estimator = PoseEstimator(self.database, tracker, start, self.loop.dead_reckoning_s)
        servo = TurretServo(gains=self.gains)
        truth = RobotState(start)

        tracked_id = switch_decision(tracker, start, self.database)
        servo.snap_pan(pan_to_marker(start, self.database[tracked_id]))
        result = NavigationResult(trajectory=Trajectory(), path=path)
        samples = result.trajectory.samples
        command = (0.0, 0.0)
        max_ticks = int(math.ceil(self.loop.max_duration_s / dt))

        logger.info(f"Navigating {len(waypoints)} waypoints from ({start.x:.2f}, {start.y:.2f})")
        for tick in range(max_ticks):
            t = tick * dt
            detections = simulate_marker_detection(
                self.world, truth.pose, servo.angles, self.detection, self.seed + tick
            )
            kind = estimator.update(t, detections, command, dt if tick else 0.0)
            if estimator.raw is not None:
                samples.append(TrajectorySample(t, estimator.raw, "raw", tracker.tracked_id))
            estimate = estimator.estimate

            previous = tracker.tracked_id
            tracked_id = switch_decision(tracker, estimate, self.database, servo)
            if tracked_id != previous:
                result.switches += 1

            command = follower.step(estimate)
            samples.append(TrajectorySample(t, estimate, kind, tracked_id, *command))
            samples.append(TrajectorySample(t, truth.pose, "truth", tracked_id, *command))
            result.cross_track.append(cross_track_error(path, truth.pose.x, truth.pose.y))
            if follower.done:
                result.reached = True
                result.duration_s = t
                break

            truth = robot_step(truth, command[0], command[1], dt, self.limits, self.world)
            command = (truth.v, truth.w)
            servo.command(pan_to_marker(estimate, self.database[tracked_id]))
            turret_step(servo, dt)
        else:
            result.duration_s = max_ticks * dt
            logger.warning(f"Navigation stopped after {self.loop.max_duration_s:.0f} s without reaching the goal")

        logger.info(
            f"Navigation {'finished' if result.reached else 'stopped'} in {result.duration_s:.1f} s, "
            f"max cross-track {result.max_cross_track:.3f} m, {result.switches} marker switches"
        )
        return result
