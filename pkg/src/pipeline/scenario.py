"""Scenario files: INI sections validated into parameter models."""
import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Type

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.core.exceptions import ConfigurationError
from src.core.models import Pose2D
from src.mapping.grid import OCCUPIED_THRESHOLD, SensorModel
from src.mapping.session import MappingConfig
from src.navigation.control import PurePursuitConfig
from src.navigation.navigator import LoopConfig
from src.navigation.tracker import TrackerConfig
from src.sim.detection import DetectionSpec
from src.sim.robot import RobotLimits
from src.sim.turret import PidGains
from src.sim.world import LaserSpec

SYNTHETIC_PREFIX = "synthetic:"
DEFAULT_RANGES_M = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0)


def parse_pose(text: str) -> Pose2D:
    """Parse ``x,y`` or ``x,y,theta_deg``."""
    parts = [p.strip() for p in str(text).split(",")]
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise ConfigurationError(f"Invalid pose '{text}'; expected x,y[,theta_deg]") from None
    if len(values) not in (2, 3):
        raise ConfigurationError(f"Invalid pose '{text}'; expected x,y[,theta_deg]")
    theta = math.radians(values[2]) if len(values) == 3 else 0.0
    return Pose2D(values[0], values[1], theta)


def parse_floats(text: str) -> Tuple[float, ...]:
    """Parse a comma-separated list of numbers."""
    try:
        return tuple(float(p) for p in str(text).split(",") if p.strip())
    except ValueError:
        raise ConfigurationError(f"Invalid number list '{text}'") from None


class ScenarioSection(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    world: str = "synthetic:corridor"
    world_length_m: Optional[float] = Field(default=None, gt=0.0)
    world_width_m: Optional[float] = Field(default=None, gt=0.0)
    markers: Optional[str] = None
    seed: Optional[int] = None
    output_dir: str = "run"
    environment: Optional[str] = None

    @property
    def is_synthetic(self) -> bool:
        return self.world.startswith(SYNTHETIC_PREFIX)

    @property
    def synthetic_name(self) -> str:
        return self.world[len(SYNTHETIC_PREFIX):]


class PlacementSection(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    ranges_m: Tuple[float, ...] = DEFAULT_RANGES_M
    marker_size_cm: Optional[float] = Field(default=None, gt=0.0)
    faces: int = 4
    corner_rule: bool = True
    occ_threshold: int = Field(default=OCCUPIED_THRESHOLD, ge=0, le=100)

    @field_validator("ranges_m", mode="before")
    @classmethod
    def _split_ranges(cls, value: Any) -> Any:
        if isinstance(value, str):
            return parse_floats(value)
        return value

    @field_validator("ranges_m")
    @classmethod
    def _positive_ranges(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if not value or any(not r > 0 for r in value):
            raise ValueError("ranges_m must be a non-empty list of positive ranges")
        return value


class NavigateSection(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    start: Optional[str] = None
    goal: Optional[str] = None
    simplify_tolerance: float = Field(default=0.0, ge=0.0)

    @field_validator("start", "goal")
    @classmethod
    def _valid_pose(cls, value: Optional[str]) -> Optional[str]:
        if value is not None:
            parse_pose(value)
        return value

    def start_pose(self) -> Optional[Pose2D]:
        return parse_pose(self.start) if self.start else None

    def goal_pose(self) -> Optional[Pose2D]:
        return parse_pose(self.goal) if self.goal else None


class TrajectorySection(BaseModel):
    """Scripted waypoints ``x,y[,theta_deg]; x,y[,theta_deg]; ...``."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    waypoints: Optional[str] = None

    def poses(self) -> Optional[List[Pose2D]]:
        """Waypoints facing their successor; the last keeps its own heading if one is given."""
        if not self.waypoints:
            return None
        chunks = [c.strip() for c in self.waypoints.split(";") if c.strip()]
        points = [parse_pose(c) for c in chunks]
        poses: List[Pose2D] = []
        for i, p in enumerate(points):
            if i + 1 < len(points):
                heading = math.atan2(points[i + 1].y - p.y, points[i + 1].x - p.x)
            elif chunks[i].count(",") == 2:
                heading = p.theta
            else:
                heading = poses[-1].theta if poses else 0.0
            poses.append(Pose2D(p.x, p.y, heading))
        return poses


SECTIONS: Dict[str, Type[BaseModel]] = {
    "scenario": ScenarioSection,
    "laser": LaserSpec,
    "detection": DetectionSpec,
    "sensor_model": SensorModel,
    "turret": PidGains,
    "robot": RobotLimits,
    "pursuit": PurePursuitConfig,
    "tracker": TrackerConfig,
    "loop": LoopConfig,
    "mapping": MappingConfig,
    "placement": PlacementSection,
    "navigate": NavigateSection,
    "trajectory": TrajectorySection,
}


@dataclass(frozen=True)
class Scenario:
    """Validated scenario parameters."""

    scenario: ScenarioSection = field(default_factory=ScenarioSection)
    laser: LaserSpec = field(default_factory=LaserSpec)
    detection: DetectionSpec = field(default_factory=DetectionSpec)
    sensor_model: SensorModel = field(default_factory=SensorModel)
    turret: PidGains = field(default_factory=PidGains)
    robot: RobotLimits = field(default_factory=RobotLimits)
    pursuit: PurePursuitConfig = field(default_factory=PurePursuitConfig)
    tracker: TrackerConfig = field(default_factory=TrackerConfig)
    loop: LoopConfig = field(default_factory=LoopConfig)
    mapping: MappingConfig = field(default_factory=MappingConfig)
    placement: PlacementSection = field(default_factory=PlacementSection)
    navigate: NavigateSection = field(default_factory=NavigateSection)
    trajectory: TrajectorySection = field(default_factory=TrajectorySection)
    source: Optional[Path] = None

    def seed(self, default: int = 0) -> int:
        return default if self.scenario.seed is None else self.scenario.seed

    def params(self, *sections: str) -> Dict[str, Any]:
        """JSON-ready parameter block of the named sections (all when none given)."""
        names = sections or tuple(SECTIONS)
        return {name: getattr(self, name).model_dump(mode="json") for name in names}

    def resolve(self, value: str) -> Path:
        """Resolve a file reference relative to the scenario file."""
        path = Path(value)
        if path.is_absolute():
            return path
        if self.source is None:
            return path.resolve()
        return self.source.parent / path


def scenario_from_mapping(data: Dict[str, Dict[str, Any]], source: Optional[Path] = None) -> Scenario:
    """
    Validate raw section dictionaries into a scenario.

    Raises:
        ConfigurationError: On unknown sections or keys and invalid values
    """
    unknown = sorted(set(data) - set(SECTIONS))
    if unknown:
        raise ConfigurationError(f"Unknown scenario sections: {', '.join(unknown)}")
    values = {}
    for name, model in SECTIONS.items():
        try:
            values[name] = model(**data.get(name, {}))
        except ValidationError as e:
            first = e.errors()[0]
            where = ".".join(str(p) for p in first.get("loc", ()))
            raise ConfigurationError(f"[{name}] {where}: {first.get('msg')}") from e
    return Scenario(source=source, **values)


def read_scenario_file(path: Path) -> Dict[str, Dict[str, str]]:
    """
    Read the raw sections of a scenario INI file.

    Raises:
        ConfigurationError: If the file is missing or unparsable
    """
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"Scenario file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise ConfigurationError(f"Cannot parse {path}: {e}") from e
    return {section: dict(parser.items(section)) for section in parser.sections()}


def load_scenario(
    path: Optional[Path] = None,
    overrides: Optional[Dict[str, Dict[str, Any]]] = None,
) -> Scenario:
    """
    Load a scenario INI file.

    Args:
        path: Scenario file; defaults only when omitted
        overrides: Section values replacing those of the file

    Returns:
        Validated scenario

    Raises:
        ConfigurationError: If the file is missing, unparsable or invalid
    """
    data = read_scenario_file(path) if path is not None else {}
    for section, values in (overrides or {}).items():
        data.setdefault(section, {}).update({k: v for k, v in values.items() if v is not None})
    source = Path(path).resolve() if path is not None else None
    return scenario_from_mapping(data, source=source)
