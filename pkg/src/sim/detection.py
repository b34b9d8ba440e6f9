"""Parametric marker detection model.

Image processing is replaced by the measured range model: a marker face is
tracked with a pose estimate up to its tracking distance and merely detected
up to its cutoff distance, provided the face looks toward the camera, the
line of sight is clear and the marker lies inside the camera field of view.
"""
import math
from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.interpolate import interp1d

from src.core.exceptions import InvalidInputError
from src.core.models import (
    TILT_MAX,
    Detection,
    Marker,
    MarkerObservation,
    Pose2D,
    TrackingState,
    TurretAngles,
    wrap_angle,
)
from src.core.raster import line_of_sight
from src.geometry.localization import simulate_observation
from src.sim.world import WorldModel


class MarkerRange(BaseModel):
    """Tracking and cutoff distance of one marker size."""

    model_config = ConfigDict(frozen=True)

    size_cm: float = Field(gt=0.0)
    tracking_m: float = Field(gt=0.0)
    cutoff_m: float = Field(gt=0.0)

    @model_validator(mode="after")
    def _tracking_below_cutoff(self) -> "MarkerRange":
        if not self.tracking_m < self.cutoff_m:
            raise ValueError(
                f"Tracking distance {self.tracking_m} must be below cutoff {self.cutoff_m}"
            )
        return self


# Measured at 1920x1080, markers hung 2.5 m above the floor
MARKER_RANGE_TABLE: Tuple[MarkerRange, ...] = (
    MarkerRange(size_cm=10, tracking_m=2.1, cutoff_m=4.8),
    MarkerRange(size_cm=20, tracking_m=4.25, cutoff_m=8.35),
    MarkerRange(size_cm=30, tracking_m=6.3, cutoff_m=11.5),
    MarkerRange(size_cm=40, tracking_m=8.5, cutoff_m=14.9),
)


def range_for_size(
    size_cm: float,
    table: Tuple[MarkerRange, ...] = MARKER_RANGE_TABLE,
) -> MarkerRange:
    """
    Range entry for a marker size.

    Sizes in the table are returned verbatim; other sizes are linearly
    interpolated (or extrapolated) from the neighbouring entries.

    Args:
        size_cm: Marker edge length in centimeters
        table: Range entries sorted by size

    Returns:
        Range entry for the size
    """
    if not size_cm > 0:
        raise InvalidInputError(f"Marker size must be positive, got {size_cm}")
    for entry in table:
        if math.isclose(entry.size_cm, size_cm):
            return entry
    if len(table) < 2:
        raise InvalidInputError("At least two range entries are needed to interpolate")
    sizes = [e.size_cm for e in table]
    tracking = interp1d(sizes, [e.tracking_m for e in table], fill_value="extrapolate")
    cutoff = interp1d(sizes, [e.cutoff_m for e in table], fill_value="extrapolate")
    return MarkerRange(
        size_cm=size_cm,
        tracking_m=float(tracking(size_cm)),
        cutoff_m=float(cutoff(size_cm)),
    )


class DetectionSpec(BaseModel):
    """Detector parameters."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    camera_fov_deg: float = Field(default=70.0, gt=0.0, le=360.0)
    face_half_angle_deg: float = Field(default=80.0, gt=0.0, le=180.0)
    persistence: float = Field(default=1.0, ge=0.0, le=1.0)
    range_sigma: float = Field(default=0.0, ge=0.0)
    yaw_sigma_deg: float = Field(default=0.0, ge=0.0)
    marker_height: float = Field(default=0.0, ge=0.0)  # above the camera
    range_table: Tuple[MarkerRange, ...] = MARKER_RANGE_TABLE

    def range_for(self, marker: Marker) -> MarkerRange:
        return range_for_size(marker.size * 100.0, self.range_table)


def _facing_face(marker: Marker, robot_pose: Pose2D) -> Tuple[int, float]:
    """Face looking most directly at the robot and its off-normal angle."""
    toward_robot = math.atan2(robot_pose.y - marker.pose.y, robot_pose.x - marker.pose.x)
    offsets = [abs(wrap_angle(toward_robot - o)) for o in marker.face_orientations()]
    face = int(np.argmin(offsets))
    return face, offsets[face]


def simulate_marker_detection(
    world: WorldModel,
    robot_pose: Pose2D,
    turret: TurretAngles,
    spec: DetectionSpec,
    rng_seed: int,
) -> List[Detection]:
    """
    Detect every marker of the world from one camera frame.

    Args:
        world: Ground-truth world with installed markers
        robot_pose: Robot pose in the global frame
        turret: Current turret angles (camera looks along heading + pan)
        spec: Detector parameters
        rng_seed: Seed for persistence and measurement noise draws

    Returns:
        One detection per marker, ordered by marker id
    """
    rng = np.random.default_rng(rng_seed)
    blocking = world.obstacles
    robot_cell = world.cell_of(robot_pose.x, robot_pose.y)
    camera_axis = robot_pose.theta + turret.pan
    half_fov = math.radians(spec.camera_fov_deg) / 2.0
    half_face = math.radians(spec.face_half_angle_deg)

    detections = []
    for marker in sorted(world.markers, key=lambda m: m.id):
        keep_draw, range_draw, yaw_draw = rng.random(), rng.normal(), rng.normal()

        distance = robot_pose.distance_to(marker.pose)
        face, off_normal = _facing_face(marker, robot_pose)
        bearing = math.atan2(marker.pose.y - robot_pose.y, marker.pose.x - robot_pose.x)

        visible = (
            distance > 0.0
            and off_normal <= half_face
            and abs(wrap_angle(bearing - camera_axis)) <= half_fov
            and line_of_sight(blocking, robot_cell, world.cell_of(marker.pose.x, marker.pose.y))
        )
        limits = spec.range_for(marker)
        if not visible or distance > limits.cutoff_m:
            state = TrackingState.NOT_VISIBLE
        elif distance > limits.tracking_m or keep_draw >= spec.persistence:
            state = TrackingState.DETECTED_ONLY
        else:
            state = TrackingState.TRACKED_WITH_POSE

        observation, seen_with = None, None
        if state is TrackingState.TRACKED_WITH_POSE:
            tilt = min(math.atan2(spec.marker_height, distance), TILT_MAX)
            clean, aimed = simulate_observation(robot_pose, marker, tilt=tilt, face=face)
            # marker sits `off` from the optical axis when the pan lags the aim
            off = wrap_angle(aimed.pan - turret.pan)
            observation = MarkerObservation(
                t_x=-distance * math.sin(off),
                t_y=clean.t_y,
                t_z=max(clean.t_z * math.cos(off) + spec.range_sigma * range_draw, 1e-6),
                r_x=clean.r_x,
                r_y=wrap_angle(clean.r_y + off + math.radians(spec.yaw_sigma_deg) * yaw_draw),
                r_z=clean.r_z,
            )
            seen_with = TurretAngles(pan=turret.pan, tilt=aimed.tilt)
        detections.append(Detection(
            marker_id=marker.id,
            face=face,
            state=state,
            distance=distance,
            observation=observation,
            turret=seen_with,
        ))
    return detections


def detections_by_id(detections: List[Detection]) -> Dict[int, Detection]:
    return {d.marker_id: d for d in detections}
