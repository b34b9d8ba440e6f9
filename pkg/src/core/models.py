"""Core domain models for MarkerNav.

Angles are radians everywhere inside the package; degrees and centimeters
appear only in ``to_dict``/``from_dict`` and file formats.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from src.core.exceptions import InvalidInputError, UnknownMarkerError

TILT_MIN = math.radians(-70.0)
TILT_MAX = math.radians(90.0)


def wrap_angle(angle: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


def _require_finite(name: str, *values: float) -> None:
    for value in values:
        if not math.isfinite(value):
            raise InvalidInputError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class Pose2D:
    """Planar pose: position in meters, heading in radians."""
    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        _require_finite("Pose2D", self.x, self.y, self.theta)
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    def distance_to(self, other: "Pose2D") -> float:
        return math.hypot(other.x - self.x, other.y - self.y)

    def compose(self, other: "Pose2D") -> "Pose2D":
        """Pose of ``other`` (expressed in this pose's frame) in the parent frame."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        return Pose2D(
            self.x + c * other.x - s * other.y,
            self.y + s * other.x + c * other.y,
            self.theta + other.theta,
        )

    def inverse(self) -> "Pose2D":
        c, s = math.cos(self.theta), math.sin(self.theta)
        return Pose2D(
            -c * self.x - s * self.y,
            s * self.x - c * self.y,
            -self.theta,
        )

    def relative_point(self, x: float, y: float) -> Tuple[float, float]:
        """Express a parent-frame point in this pose's frame."""
        dx, dy = x - self.x, y - self.y
        c, s = math.cos(self.theta), math.sin(self.theta)
        return c * dx + s * dy, -s * dx + c * dy

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization (heading in degrees)."""
        return {"x": self.x, "y": self.y, "theta_deg": math.degrees(self.theta)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Pose2D":
        """Create from dictionary."""
        return cls(
            x=float(data["x"]),
            y=float(data["y"]),
            theta=math.radians(float(data.get("theta_deg", 0.0))),
        )


@dataclass(frozen=True)
class MarkerObservation:
    """Marker pose in the camera frame as reported by the detector.

    ``t_z`` is the distance along the optical axis; ``r_y`` is the yaw the
    detector reports, related to the robot heading by
    ``heading = pan + r_y + theta_m + pi``.
    """
    t_x: float
    t_y: float
    t_z: float
    r_x: float
    r_y: float
    r_z: float

    def __post_init__(self):
        _require_finite(
            "MarkerObservation",
            self.t_x, self.t_y, self.t_z, self.r_x, self.r_y, self.r_z,
        )
        if self.t_z <= 0.0:
            raise InvalidInputError(f"Marker must be in front of the camera (t_z={self.t_z})")


@dataclass(frozen=True)
class TurretAngles:
    """Pan (robot-relative, anticlockwise) and tilt of the camera turret."""
    pan: float
    tilt: float = 0.0

    def __post_init__(self):
        _require_finite("TurretAngles", self.pan, self.tilt)
        if not TILT_MIN - 1e-12 <= self.tilt <= TILT_MAX + 1e-12:
            raise InvalidInputError(
                f"Tilt {math.degrees(self.tilt):.2f} deg outside [-70, 90] deg"
            )
        object.__setattr__(self, "pan", wrap_angle(self.pan))


@dataclass(frozen=True)
class PolarFix:
    """Range and bearing of a marker projected onto the floor plane."""
    r: float
    bearing: float

    def __post_init__(self):
        _require_finite("PolarFix", self.r, self.bearing)
        if self.r < 0.0:
            raise InvalidInputError(f"Range must be non-negative, got {self.r}")


@dataclass(frozen=True)
class Marker:
    """Installed fiducial marker unit (one to four faces on a cuboid)."""
    id: int
    pose: Pose2D
    faces: int = 4
    size: float = 0.20  # meters, edge length

    def __post_init__(self):
        if self.faces not in (1, 2, 4):
            raise InvalidInputError(f"Marker faces must be 1, 2 or 4, got {self.faces}")
        if not self.size > 0.0:
            raise InvalidInputError(f"Marker size must be positive, got {self.size}")

    @property
    def theta_m(self) -> float:
        return self.pose.theta

    def face_orientations(self) -> List[float]:
        """Outward normal directions of every face, first face = theta_m."""
        step = 2.0 * math.pi / self.faces
        return [wrap_angle(self.theta_m + k * step) for k in range(self.faces)]

    def to_dict(self) -> Dict[str, Any]:
        """Convert to a marker CSV row."""
        return {
            "id": self.id,
            "x_m": self.pose.x,
            "y_m": self.pose.y,
            "theta_deg": math.degrees(self.pose.theta),
            "size_cm": self.size * 100.0,
            "faces": self.faces,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Marker":
        """Create from a marker CSV row."""
        return cls(
            id=int(data["id"]),
            pose=Pose2D(
                float(data["x_m"]),
                float(data["y_m"]),
                math.radians(float(data["theta_deg"])),
            ),
            faces=int(data.get("faces", 4)),
            size=float(data.get("size_cm", 20.0)) / 100.0,
        )


class TrackingState(str, Enum):
    """Detection outcome for one marker face."""
    TRACKED_WITH_POSE = "tracked_with_pose"
    DETECTED_ONLY = "detected_only"
    NOT_VISIBLE = "not_visible"


@dataclass(frozen=True)
class Detection:
    """Detector output for one marker in one frame."""
    marker_id: int
    face: int
    state: TrackingState
    distance: float
    observation: Optional[MarkerObservation] = None
    turret: Optional[TurretAngles] = None


@dataclass
class RobotState:
    """Ground-truth kinematic state of the robot."""
    pose: Pose2D
    v: float = 0.0
    w: float = 0.0


@dataclass(frozen=True)
class TrajectorySample:
    """One row of a trajectory log."""
    t: float
    pose: Pose2D
    kind: str  # raw, smoothed, dead_reckoned, truth
    tracked_marker_id: Optional[int] = None
    v: float = 0.0
    w: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        """Convert to a trajectory CSV row."""
        return {
            "t_s": self.t,
            "x_m": self.pose.x,
            "y_m": self.pose.y,
            "theta_rad": self.pose.theta,
            "kind": self.kind,
            "tracked_marker_id": "" if self.tracked_marker_id is None else self.tracked_marker_id,
            "v": self.v,
            "w": self.w,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrajectorySample":
        """Create from a trajectory CSV row."""
        marker_id = data.get("tracked_marker_id", "")
        return cls(
            t=float(data["t_s"]),
            pose=Pose2D(float(data["x_m"]), float(data["y_m"]), float(data["theta_rad"])),
            kind=data["kind"],
            tracked_marker_id=int(marker_id) if marker_id not in ("", None) else None,
            v=float(data.get("v", 0.0)),
            w=float(data.get("w", 0.0)),
        )


@dataclass
class Trajectory:
    """Ordered trajectory log."""
    samples: List[TrajectorySample] = field(default_factory=list)

    def of_kind(self, *kinds: str) -> List[TrajectorySample]:
        return [s for s in self.samples if s.kind in kinds]


class MarkerDatabase(Mapping[int, Marker]):
    """Marker id -> installed marker, with unique ids."""

    def __init__(self, markers: Iterable[Marker] = ()):
        self._markers: Dict[int, Marker] = {}
        for marker in markers:
            self.add(marker)

    def add(self, marker: Marker) -> None:
        if marker.id in self._markers:
            raise InvalidInputError(f"Duplicate marker id {marker.id}")
        self._markers[marker.id] = marker

    def __getitem__(self, marker_id: int) -> Marker:
        try:
            return self._markers[marker_id]
        except KeyError:
            raise UnknownMarkerError(marker_id) from None

    def __contains__(self, marker_id: object) -> bool:
        return marker_id in self._markers

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._markers))

    def __len__(self) -> int:
        return len(self._markers)

    def markers(self) -> List[Marker]:
        """Markers ordered by id."""
        return [self._markers[k] for k in sorted(self._markers)]
