"""Ground-truth world model and 2D laser scanner simulation."""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.core.exceptions import InvalidInputError, InvalidPoseError
from src.core.models import Marker, Pose2D
from src.core.raster import Cell, cell_center, world_to_cell
from src.geometry.transforms import scanner_pose


class LaserSpec(BaseModel):
    """Planar laser scanner parameters."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    fov_deg: float = Field(default=240.0, gt=0.0, le=360.0)
    max_range: float = Field(default=3.5, gt=0.0)
    beam_count: int = Field(default=481, ge=1)
    range_sigma: float = Field(default=0.0, ge=0.0)
    nan_rate: float = Field(default=0.0, ge=0.0, le=1.0)
    inf_rate: float = Field(default=0.0, ge=0.0, le=1.0)
    offset_y: float = 0.0  # laser below turret, along -y of the turret base
    rate_hz: float = Field(default=10.0, gt=0.0)

    def bearings(self) -> np.ndarray:
        """Robot-relative beam bearings, anticlockwise starting from the right."""
        half = math.radians(self.fov_deg) / 2.0
        if self.beam_count == 1:
            return np.zeros(1)
        return np.linspace(-half, half, self.beam_count)


@dataclass
class WorldModel:
    """
    Ground-truth environment.

    ``obstacles`` and ``free`` are boolean bitmaps indexed ``[row, col]``;
    cells that are neither lie outside the explorable area.
    """

    obstacles: np.ndarray
    free: np.ndarray
    resolution: float = 20.0
    origin: Tuple[float, float] = (0.0, 0.0)
    markers: List[Marker] = field(default_factory=list)
    name: str = "world"

    def __post_init__(self):
        self.obstacles = np.asarray(self.obstacles, dtype=bool)
        self.free = np.asarray(self.free, dtype=bool)
        if self.obstacles.ndim != 2 or self.obstacles.size == 0:
            raise InvalidInputError("World bitmap must be a non-empty 2D array")
        if self.free.shape != self.obstacles.shape:
            raise InvalidInputError("Free mask and obstacle bitmap differ in shape")
        if np.any(self.free & self.obstacles):
            raise InvalidInputError("Cells cannot be both free and obstacle")
        if not self.resolution > 0:
            raise InvalidInputError(f"Resolution must be positive, got {self.resolution}")
        for marker in self.markers:
            if not self.is_free(marker.pose.x, marker.pose.y):
                raise InvalidInputError(f"Marker {marker.id} is not in free space")

    @property
    def shape(self) -> Tuple[int, int]:
        return self.obstacles.shape

    def cell_of(self, x: float, y: float) -> Cell:
        return world_to_cell(x, y, self.resolution, self.origin)

    def center_of(self, cell: Cell) -> Tuple[float, float]:
        return cell_center(cell[0], cell[1], self.resolution, self.origin)

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.shape[0] and 0 <= cell[1] < self.shape[1]

    def is_free(self, x: float, y: float) -> bool:
        cell = self.cell_of(x, y)
        return self.in_bounds(cell) and bool(self.free[cell])

    def occupancy_cells(self) -> np.ndarray:
        """Ground truth as occupancy values: 0 free, 100 obstacle, -1 elsewhere."""
        cells = np.full(self.shape, -1, dtype=np.int16)
        cells[self.free] = 0
        cells[self.obstacles] = 100
        return cells

    def marker(self, marker_id: int) -> Optional[Marker]:
        for marker in self.markers:
            if marker.id == marker_id:
                return marker
        return None


def _cast_rays(
    obstacles: np.ndarray,
    start: Tuple[float, float],
    angles: np.ndarray,
    max_cells: float,
) -> np.ndarray:
    """Distance in cells from ``start`` to the first obstacle along each angle.

    Exact cell-entry traversal over all rays at once; ``inf`` where no
    obstacle is met within ``max_cells`` or the ray leaves the bitmap.
    """
    height, width = obstacles.shape
    u0, v0 = start
    dx, dy = np.cos(angles), np.sin(angles)
    col = np.full(angles.shape, int(math.floor(u0)))
    row = np.full(angles.shape, int(math.floor(v0)))
    step_c = np.where(dx > 0, 1, -1)
    step_r = np.where(dy > 0, 1, -1)

    with np.errstate(divide="ignore"):
        delta_c = np.where(dx != 0, np.abs(1.0 / dx), np.inf)
        delta_r = np.where(dy != 0, np.abs(1.0 / dy), np.inf)
    frac_c = np.where(dx > 0, col + 1 - u0, u0 - col)
    frac_r = np.where(dy > 0, row + 1 - v0, v0 - row)
    t_c = np.where(dx != 0, frac_c * delta_c, np.inf)
    t_r = np.where(dy != 0, frac_r * delta_r, np.inf)

    hits = np.full(angles.shape, np.inf)
    active = np.ones(angles.shape, dtype=bool)
    max_steps = int(2 * math.ceil(max_cells) + 4)
    for _ in range(max_steps):
        if not active.any():
            break
        along_c = active & (t_c <= t_r)
        along_r = active & ~along_c
        t_entry = np.where(along_c, t_c, t_r)
        col = np.where(along_c, col + step_c, col)
        row = np.where(along_r, row + step_r, row)
        t_c = np.where(along_c, t_c + delta_c, t_c)
        t_r = np.where(along_r, t_r + delta_r, t_r)

        beyond = active & (t_entry > max_cells)
        outside = active & ((col < 0) | (col >= width) | (row < 0) | (row >= height))
        active &= ~(beyond | outside)

        blocked = np.zeros(angles.shape, dtype=bool)
        blocked[active] = obstacles[row[active], col[active]]
        hits[blocked] = t_entry[blocked]
        active &= ~blocked
    return hits


def simulate_scan(
    world: WorldModel,
    robot_pose: Pose2D,
    spec: LaserSpec,
    rng_seed: int,
) -> np.ndarray:
    """
    Simulate one raw laser scan.

    Args:
        world: Ground-truth world
        robot_pose: Robot pose in the global frame
        spec: Laser parameters
        rng_seed: Seed of the noise and corruption draws

    Returns:
        Per-beam ranges in meters; ``inf`` for beams without a return

    Raises:
        InvalidPoseError: If the scanner lies outside free space
    """
    sensor = scanner_pose(robot_pose, spec.offset_y)
    if not world.is_free(sensor.x, sensor.y):
        raise InvalidPoseError(f"Scanner at ({sensor.x:.3f}, {sensor.y:.3f}) is not in free space")

    start = (
        sensor.x * world.resolution + world.origin[0],
        sensor.y * world.resolution + world.origin[1],
    )
    angles = sensor.theta + spec.bearings()
    hits = _cast_rays(world.obstacles, start, angles, spec.max_range * world.resolution)
    ranges = hits / world.resolution

    rng = np.random.default_rng(rng_seed)
    noise = rng.normal(0.0, spec.range_sigma, ranges.shape) if spec.range_sigma > 0 else 0.0
    nan_draw = rng.random(ranges.shape)
    inf_draw = rng.random(ranges.shape)

    ranges = np.where(np.isfinite(ranges), ranges + noise, np.inf)
    ranges[inf_draw < spec.inf_rate] = np.inf
    ranges[nan_draw < spec.nan_rate] = np.nan
    return ranges

