"""Waypoint maneuvers, pure pursuit and segment-wise path following."""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.core.exceptions import InvalidInputError
from src.core.models import Pose2D, wrap_angle


class PurePursuitConfig(BaseModel):
    """Path-following parameters."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    lookahead: float = Field(default=1.0, gt=0.0)
    v_max: float = Field(default=0.3, gt=0.0)
    w_max: float = Field(default=1.0, gt=0.0)
    goal_tolerance: float = Field(default=0.05, gt=0.0)
    heading_tolerance_deg: float = Field(default=1.0, gt=0.0)
    min_speed_ratio: float = Field(default=0.2, gt=0.0, le=1.0)
    turn_gain: float = Field(default=2.0, gt=0.0)


@dataclass(frozen=True)
class WaypointManeuver:
    """Rotate, translate, rotate."""

    delta_theta1: float
    delta_trans: float
    delta_theta2: float

    def apply(self, start: Pose2D) -> Pose2D:
        heading = start.theta + self.delta_theta1
        return Pose2D(
            start.x + self.delta_trans * math.cos(heading),
            start.y + self.delta_trans * math.sin(heading),
            heading + self.delta_theta2,
        )


def maneuver(start: Pose2D, dest: Pose2D) -> WaypointManeuver:
    """Decompose the motion between two poses into two rotations and a translation."""
    dx, dy = dest.x - start.x, dest.y - start.y
    trans = math.hypot(dx, dy)
    theta1 = wrap_angle(math.atan2(dy, dx) - start.theta) if trans > 0 else 0.0
    theta2 = wrap_angle(dest.theta - start.theta - theta1)
    return WaypointManeuver(theta1, trans, theta2)


@dataclass(frozen=True)
class PursuitCommand:
    v: float
    w: float
    done: bool = False
    curvature: float = 0.0
    goal: Optional[Tuple[float, float]] = None


def _as_polyline(path) -> np.ndarray:
    if hasattr(path, "points"):
        path = path.points()
    points = np.asarray(path, dtype=float).reshape(-1, 2)
    if points.shape[0] == 0:
        raise InvalidInputError("Path is empty")
    return points


def closest_on_polyline(points: np.ndarray, x: float, y: float) -> Tuple[float, float, np.ndarray]:
    """(arc length of the closest point, distance to it, cumulative arc lengths)."""
    seg = np.diff(points, axis=0)
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    cumulative = np.concatenate([[0.0], np.cumsum(seg_len)])
    if seg.shape[0] == 0:
        return 0.0, math.hypot(points[0, 0] - x, points[0, 1] - y), cumulative
    rel = np.array([x, y]) - points[:-1]
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(seg_len > 0, np.einsum("ij,ij->i", rel, seg) / seg_len ** 2, 0.0)
    t = np.clip(t, 0.0, 1.0)
    nearest = points[:-1] + seg * t[:, None]
    dist = np.hypot(nearest[:, 0] - x, nearest[:, 1] - y)
    i = int(np.argmin(dist))
    return float(cumulative[i] + t[i] * seg_len[i]), float(dist[i]), cumulative


def point_at_arc(points: np.ndarray, cumulative: np.ndarray, s: float) -> np.ndarray:
    if s >= cumulative[-1]:
        return points[-1]
    i = int(np.searchsorted(cumulative, s, side="right") - 1)
    span = cumulative[i + 1] - cumulative[i]
    t = 0.0 if span == 0 else (s - cumulative[i]) / span
    return points[i] + t * (points[i + 1] - points[i])


def cross_track_error(path, x: float, y: float) -> float:
    """Distance from a point to the path polyline."""
    return closest_on_polyline(_as_polyline(path), x, y)[1]


def pure_pursuit_step(pose: Pose2D, path, cfg: PurePursuitConfig = PurePursuitConfig()) -> PursuitCommand:
    """
    One pure-pursuit control step.

    The goal point lies one lookahead further along the path than the
    closest path point (or at the path end). The commanded curvature is
    ``2 * y_goal / L**2`` with ``y_goal`` the lateral goal offset in the
    robot frame; speed tapers over the last lookahead of path.

    Args:
        pose: Current pose estimate
        path: PathPlan or (N, 2) polyline
        cfg: Controller parameters

    Returns:
        Velocity command; ``done`` once within tolerance of the path end
    """
    points = _as_polyline(path)
    end = points[-1]
    if math.hypot(end[0] - pose.x, end[1] - pose.y) <= cfg.goal_tolerance:
        return PursuitCommand(0.0, 0.0, done=True, goal=(float(end[0]), float(end[1])))

    s, _, cumulative = closest_on_polyline(points, pose.x, pose.y)
    goal = point_at_arc(points, cumulative, s + cfg.lookahead)
    _, y_goal = pose.relative_point(float(goal[0]), float(goal[1]))
    curvature = 2.0 * y_goal / cfg.lookahead ** 2

    remaining = max(cumulative[-1] - s, math.hypot(end[0] - pose.x, end[1] - pose.y))
    v = cfg.v_max * float(np.clip(remaining / cfg.lookahead, cfg.min_speed_ratio, 1.0))
    w = float(np.clip(v * curvature, -cfg.w_max, cfg.w_max))
    return PursuitCommand(v, w, curvature=curvature, goal=(float(goal[0]), float(goal[1])))


@dataclass
class PathFollower:
    """
    Follows waypoints one segment at a time: turn toward the next waypoint,
    pure-pursue the segment, and finally turn to the last waypoint's heading.
    """

    waypoints: List[Pose2D]
    cfg: PurePursuitConfig = field(default_factory=PurePursuitConfig)
    index: int = 0
    phase: str = "rotate"
    segment_start: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if not self.waypoints:
            raise InvalidInputError("Path follower needs at least one waypoint")

    @property
    def done(self) -> bool:
        return self.phase == "done"

    def _turn(self, error: float) -> Tuple[float, float]:
        return 0.0, float(np.clip(self.cfg.turn_gain * error, -self.cfg.w_max, self.cfg.w_max))

    def current_segment(self) -> Optional[np.ndarray]:
        if self.segment_start is None or self.index >= len(self.waypoints):
            return None
        target = self.waypoints[self.index]
        return np.array([self.segment_start, (target.x, target.y)])

    def step(self, pose: Pose2D) -> Tuple[float, float]:
        """Velocity command for the current pose estimate."""
        tolerance = math.radians(self.cfg.heading_tolerance_deg)
        if self.phase == "rotate":
            target = self.waypoints[self.index]
            if pose.distance_to(target) <= self.cfg.goal_tolerance:
                self._advance(pose)
                return self.step(pose) if not self.done else (0.0, 0.0)
            if self.segment_start is None:
                self.segment_start = (pose.x, pose.y)
            error = maneuver(pose, target).delta_theta1
            if abs(error) > tolerance:
                return self._turn(error)
            self.phase = "pursue"

        if self.phase == "pursue":
            command = pure_pursuit_step(pose, self.current_segment(), self.cfg)
            if not command.done:
                return command.v, command.w
            self._advance(pose)
            if self.done:
                return 0.0, 0.0

        if self.phase == "final":
            error = wrap_angle(self.waypoints[-1].theta - pose.theta)
            if abs(error) > tolerance:
                return self._turn(error)
            self.phase = "done"
        return 0.0, 0.0

    def _advance(self, pose: Pose2D) -> None:
        target = self.waypoints[self.index]
        self.segment_start = (target.x, target.y)
        self.index += 1
        self.phase = "rotate" if self.index < len(self.waypoints) else "final"
