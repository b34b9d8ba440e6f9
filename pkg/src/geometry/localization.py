"""Marker-based robot localization and marker-to-marker chaining.

Conventions: a face with orientation ``theta_m`` has outward normal
``(cos theta_m, sin theta_m)``. Pan is measured anticlockwise from the robot
heading. The detector yaw ``r_y`` satisfies
``heading = pan + r_y + theta_face + pi``, and the marker lies at global
bearing ``heading + pan`` from the robot.
"""
import math
from typing import Mapping, Optional, Tuple

from src.core.exceptions import InvalidInputError, NoFixError
from src.core.models import (
    Marker,
    MarkerObservation,
    PolarFix,
    Pose2D,
    TurretAngles,
    wrap_angle,
)
from src.geometry.transforms import Transform2D, robot_to_marker_transform


def project_to_plane(obs: MarkerObservation, turret: TurretAngles) -> PolarFix:
    """Project the optical-axis distance onto the floor plane.

    Args:
        obs: Marker observation from the detector
        turret: Turret angles at capture time

    Returns:
        Planar range and robot-relative bearing of the marker
    """
    return PolarFix(r=obs.t_z * math.cos(turret.tilt), bearing=turret.pan)


def centering_offset(obs: MarkerObservation, turret: TurretAngles) -> float:
    """Pan correction, anticlockwise, that brings the marker onto the optical axis.

    Camera x points right, so a marker left of the axis has ``t_x < 0``.
    """
    return math.atan2(-obs.t_x, obs.t_z * math.cos(turret.tilt))


def _face_orientation(marker: Marker, face: int) -> float:
    if not 0 <= face < marker.faces:
        raise InvalidInputError(f"Marker {marker.id} has no face {face}")
    return marker.face_orientations()[face]


def robot_pose_from_marker(
    obs: MarkerObservation,
    turret: TurretAngles,
    marker_id: int,
    database: Mapping[int, Marker],
    face: int = 0,
) -> Pose2D:
    """
    Recover the global robot pose from one pose-grade marker observation.

    Args:
        obs: Marker observation from the detector
        turret: Turret angles at capture time
        marker_id: Id of the observed marker
        database: Installed markers by id
        face: Index of the observed face

    Returns:
        Robot pose in the global frame

    Raises:
        UnknownMarkerError: If the marker id is not in the database
    """
    marker = database[marker_id]
    fix = project_to_plane(obs, turret)
    heading = wrap_angle(turret.pan + obs.r_y + _face_orientation(marker, face) + math.pi)
    bearing = heading + fix.bearing
    return Pose2D(
        marker.pose.x - fix.r * math.cos(bearing),
        marker.pose.y - fix.r * math.sin(bearing),
        heading,
    )


def simulate_observation(
    robot_pose: Pose2D,
    marker: Marker,
    tilt: float = 0.0,
    face: int = 0,
) -> Tuple[MarkerObservation, TurretAngles]:
    """Synthesize the observation of a marker face with the turret aimed at it.

    Inverse of :func:`robot_pose_from_marker` for noiseless inputs.
    """
    dx = marker.pose.x - robot_pose.x
    dy = marker.pose.y - robot_pose.y
    r = math.hypot(dx, dy)
    if r == 0.0:
        raise InvalidInputError("Robot and marker positions coincide")
    turret = TurretAngles(pan=math.atan2(dy, dx) - robot_pose.theta, tilt=tilt)
    yaw = wrap_angle(
        robot_pose.theta - turret.pan - _face_orientation(marker, face) - math.pi
    )
    obs = MarkerObservation(
        t_x=0.0,
        t_y=0.0,
        t_z=r / math.cos(tilt),
        r_x=0.0,
        r_y=yaw,
        r_z=0.0,
    )
    return obs, turret


def chain_marker_transform(
    pose_wrt_prev: Pose2D,
    new_obs: Optional[MarkerObservation],
    turret: TurretAngles,
) -> Transform2D:
    """
    Pose of a newly observed marker face in the previous marker's frame.

    The robot must be stationary in the transition zone with its pose known
    w.r.t. the previous marker. The observed face frame sits at
    ``r (cos pan, sin pan)`` in the robot frame with orientation
    ``-(pan + r_y + pi)``, the negated robot heading in that face frame.

    Args:
        pose_wrt_prev: Robot pose in the previous marker's frame
        new_obs: Pose-grade observation of the new marker, if any
        turret: Turret angles at capture time

    Returns:
        Transform from the new face frame to the previous marker frame

    Raises:
        NoFixError: If no observation of the new marker is available
    """
    if new_obs is None:
        raise NoFixError("No pose-grade observation of the new marker")
    fix = project_to_plane(new_obs, turret)
    heading_in_new = turret.pan + new_obs.r_y + math.pi
    marker_in_robot = Pose2D(
        fix.r * math.cos(fix.bearing),
        fix.r * math.sin(fix.bearing),
        -heading_in_new,
    )
    return robot_to_marker_transform(pose_wrt_prev) @ Transform2D.from_pose(marker_in_robot)
