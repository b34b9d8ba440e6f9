"""Occupancy grids: local ray tracing, global fusion and binarization.

Cell coding: -1 unknown, otherwise occupancy probability scaled to 0..100.
Local grids use the codes 0 (free along a beam), 100 (beam endpoint) and
50 (possible obstacle next to an endpoint).
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import expit, logit
from skimage.draw import line
from skimage.morphology import skeletonize

from src.core.exceptions import GridBoundsError, InvalidInputError
from src.core.models import Pose2D
from src.mapping.scan import CleanScan

logger = logging.getLogger("markernav")

UNKNOWN = -1
FREE = 0
POSSIBLE = 50
OCCUPIED = 100

DEFAULT_RESOLUTION = 20.0
DEFAULT_SIZE = 1000
OCCUPIED_THRESHOLD = 50


class SensorModel(BaseModel):
    """Occupancy probability implied by each local cell code."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    p_occupied: float = Field(default=0.7, gt=0.0, lt=1.0)
    p_free: float = Field(default=0.3, gt=0.0, lt=1.0)
    p_possible: float = Field(default=0.6, gt=0.0, lt=1.0)
    p_prior: float = Field(default=0.5, gt=0.0, lt=1.0)

    def log_odds_increments(self) -> dict:
        prior = logit(self.p_prior)
        return {
            OCCUPIED: float(logit(self.p_occupied) - prior),
            FREE: float(logit(self.p_free) - prior),
            POSSIBLE: float(logit(self.p_possible) - prior),
        }


@dataclass
class OccupancyGrid:
    """Global probability map; ``origin`` is the (col, row) of world (0, 0)."""

    cells: np.ndarray
    resolution: float = DEFAULT_RESOLUTION
    origin: Tuple[float, float] = (DEFAULT_SIZE / 2, DEFAULT_SIZE / 2)

    def __post_init__(self):
        self.cells = np.asarray(self.cells, dtype=np.int16)
        if self.cells.ndim != 2:
            raise InvalidInputError("Grid cells must be a 2D array")
        if not self.resolution > 0:
            raise InvalidInputError(f"Resolution must be positive, got {self.resolution}")
        bad = (self.cells != UNKNOWN) & ((self.cells < 0) | (self.cells > 100))
        if bad.any():
            raise InvalidInputError("Grid cells must be -1 or within [0, 100]")

    @classmethod
    def empty(
        cls,
        width: int = DEFAULT_SIZE,
        height: int = DEFAULT_SIZE,
        resolution: float = DEFAULT_RESOLUTION,
    ) -> "OccupancyGrid":
        """Unknown grid with the world origin at its center."""
        return cls(
            cells=np.full((height, width), UNKNOWN, dtype=np.int16),
            resolution=resolution,
            origin=(width / 2, height / 2),
        )

    @property
    def shape(self) -> Tuple[int, int]:
        return self.cells.shape

    def known_free(self, threshold: int = OCCUPIED_THRESHOLD) -> np.ndarray:
        return (self.cells != UNKNOWN) & (self.cells < threshold)


@dataclass
class ObservationCounts:
    """Per-cell observation counts and accumulated log-odds."""

    counts: np.ndarray
    log_odds: Optional[np.ndarray] = None

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.log_odds is None:
            self.log_odds = np.zeros(self.counts.shape, dtype=np.float64)
        if np.any(self.counts < 0):
            raise InvalidInputError("Observation counts must be non-negative")

    @classmethod
    def like(cls, grid: OccupancyGrid) -> "ObservationCounts":
        return cls(counts=np.zeros(grid.shape, dtype=np.int64))


@dataclass(frozen=True, eq=False)
class LocalGrid:
    """Scanner-centred grid; the scanner sits at cell ``(center, center)``."""

    cells: np.ndarray
    resolution: float
    center: int


def local_grid_size(ceiling: float, resolution: float) -> int:
    return 2 * (int(math.ceil(ceiling * resolution)) + 1) + 1


def raytrace_local(scan: CleanScan, resolution: float = DEFAULT_RESOLUTION) -> LocalGrid:
    """
    Ray trace a clean scan into a scanner-centred local grid.

    Each beam is a Bresenham line from the scanner. Cells along the line are
    free; the endpoint is occupied when the range is below the ceiling and
    its 8-neighbours become possible obstacles. Where codes collide the
    endpoint wins over free, and free wins over possible.

    Args:
        scan: Clean scan (bearings relative to the scanner heading)
        resolution: Cells per meter

    Returns:
        Local grid, rows along the scanner's y axis
    """
    size = local_grid_size(scan.ceiling, resolution)
    center = size // 2
    free = np.zeros((size, size), dtype=bool)
    occupied = np.zeros((size, size), dtype=bool)
    possible = np.zeros((size, size), dtype=bool)

    end_rows = center + np.rint(scan.ranges * np.sin(scan.bearings) * resolution).astype(int)
    end_cols = center + np.rint(scan.ranges * np.cos(scan.bearings) * resolution).astype(int)
    hits = scan.ranges < scan.ceiling

    for end_row, end_col, hit in zip(end_rows, end_cols, hits):
        rows, cols = line(center, center, int(end_row), int(end_col))
        if hit:
            free[rows[:-1], cols[:-1]] = True
            occupied[end_row, end_col] = True
            possible[end_row - 1:end_row + 2, end_col - 1:end_col + 2] = True
        else:
            free[rows, cols] = True

    cells = np.full((size, size), UNKNOWN, dtype=np.int16)
    cells[possible] = POSSIBLE
    cells[free] = FREE
    cells[occupied] = OCCUPIED
    return LocalGrid(cells=cells, resolution=resolution, center=center)


def local_to_global_cells(
    local: LocalGrid,
    grid: OccupancyGrid,
    sensor_pose: Pose2D,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Global (rows, cols) and codes of the known cells of a local grid."""
    rows, cols = np.nonzero(local.cells != UNKNOWN)
    codes = local.cells[rows, cols]
    lx = (cols - local.center) / local.resolution
    ly = (rows - local.center) / local.resolution
    c, s = math.cos(sensor_pose.theta), math.sin(sensor_pose.theta)
    gx = sensor_pose.x + c * lx - s * ly
    gy = sensor_pose.y + s * lx + c * ly
    g_cols = np.floor(gx * grid.resolution + grid.origin[0]).astype(np.int64)
    g_rows = np.floor(gy * grid.resolution + grid.origin[1]).astype(np.int64)
    return g_rows, g_cols, codes


def fuse_global(
    grid: OccupancyGrid,
    counts: ObservationCounts,
    local: LocalGrid,
    sensor_pose: Pose2D,
    sensor_model: SensorModel = SensorModel(),
) -> OccupancyGrid:
    """
    Fuse a local grid into the global grid with the odds-product update.

    Every known local cell adds its log-odds evidence to the global cell it
    lands in; the stored value is the posterior probability scaled to 0..100.

    Args:
        grid: Global grid, updated in place
        counts: Observation counts and log-odds, updated in place
        local: Local grid from :func:`raytrace_local`
        sensor_pose: Marker-derived scanner pose in the global frame
        sensor_model: Probabilities of the local cell codes

    Returns:
        The updated grid

    Raises:
        GridBoundsError: If any observed cell falls outside the grid
    """
    if counts.counts.shape != grid.shape:
        raise InvalidInputError("Counts and grid differ in shape")
    rows, cols, codes = local_to_global_cells(local, grid, sensor_pose)
    height, width = grid.shape
    if rows.size and (rows.min() < 0 or cols.min() < 0 or rows.max() >= height or cols.max() >= width):
        raise GridBoundsError(
            f"Scan at ({sensor_pose.x:.2f}, {sensor_pose.y:.2f}) reaches outside the "
            f"{width}x{height} grid"
        )

    increments = sensor_model.log_odds_increments()
    evidence = np.zeros(codes.shape, dtype=np.float64)
    for code, value in increments.items():
        evidence[codes == code] = value
    np.add.at(counts.log_odds, (rows, cols), evidence)
    np.add.at(counts.counts, (rows, cols), 1)

    prior = logit(sensor_model.p_prior)
    touched = (rows, cols)
    posterior = expit(counts.log_odds[touched] + prior)
    grid.cells[touched] = np.rint(100.0 * posterior).astype(np.int16)
    logger.debug(f"Fused {rows.size} cells at ({sensor_pose.x:.2f}, {sensor_pose.y:.2f})")
    return grid


def binarize_and_thin(grid: OccupancyGrid, occ_threshold: int = OCCUPIED_THRESHOLD) -> np.ndarray:
    """
    Threshold a grid and thin obstacles to 1-pixel boundaries.

    Cells at or above the threshold are obstacles; unknown cells count as
    free.

    Returns:
        uint8 array, 1 for obstacle skeleton cells
    """
    obstacles = grid.cells >= occ_threshold
    return skeletonize(obstacles).astype(np.uint8)
