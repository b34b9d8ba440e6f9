"""Tests for occupancy grids and fusion."""
import math

import numpy as np
import pytest
from scipy.special import expit, logit

from src.core.exceptions import GridBoundsError, InvalidInputError
from src.core.models import Pose2D
from src.mapping.grid import (
    FREE,
    OCCUPIED,
    POSSIBLE,
    UNKNOWN,
    LocalGrid,
    ObservationCounts,
    OccupancyGrid,
    SensorModel,
    binarize_and_thin,
    fuse_global,
    local_grid_size,
    raytrace_local,
)
from src.mapping.scan import CleanScan


def _single_beam(range_m: float, bearing: float = 0.0) -> CleanScan:
    return CleanScan(np.array([range_m]), np.array([bearing]))


def test_local_grid_size():
    """Test the local grid fits the range ceiling."""
    assert local_grid_size(3.5, 20.0) == 143


def test_raytrace_local_single_hit():
    """Test a beam marks free cells, the endpoint and its neighbours."""
    local = raytrace_local(_single_beam(1.0))
    c = local.center

    assert local.cells.shape == (143, 143)
    assert local.cells[c, c + 20] == OCCUPIED
    assert (local.cells[c, c:c + 20] == FREE).all()
    assert local.cells[c + 1, c + 20] == POSSIBLE
    assert local.cells[c, c + 21] == POSSIBLE
    assert local.cells[c - 5, c + 5] == UNKNOWN


def test_raytrace_local_max_range_is_free():
    """Test a beam at the ceiling leaves no obstacle."""
    local = raytrace_local(_single_beam(3.5, math.pi / 2))
    c = local.center

    assert not (local.cells == OCCUPIED).any()
    assert local.cells[c + 70, c] == FREE


def test_raytrace_local_code_priority():
    """Test endpoint beats free and free beats possible where beams overlap."""
    scan = CleanScan(np.array([1.0, 2.0]), np.array([0.0, 0.0]))
    local = raytrace_local(scan)
    c = local.center

    assert local.cells[c, c + 20] == OCCUPIED
    assert local.cells[c, c + 21] == FREE
    assert local.cells[c, c + 40] == OCCUPIED


def test_occupancy_grid_validates_values():
    """Test grid cells must be -1 or a percentage."""
    with pytest.raises(InvalidInputError):
        OccupancyGrid(np.array([[0, 101]]))
    with pytest.raises(InvalidInputError):
        OccupancyGrid(np.zeros(4))


def test_occupancy_grid_empty():
    """Test an empty grid is unknown with its origin at the center."""
    grid = OccupancyGrid.empty(width=10, height=8)

    assert (grid.cells == UNKNOWN).all()
    assert grid.origin == (5.0, 4.0)
    assert not grid.known_free().any()


def test_sensor_model_increments():
    """Test log-odds increments relative to the prior."""
    increments = SensorModel().log_odds_increments()

    assert increments[OCCUPIED] == pytest.approx(logit(0.7))
    assert increments[FREE] == pytest.approx(logit(0.3))
    assert increments[POSSIBLE] == pytest.approx(logit(0.6))


def test_fuse_global_single_scan_values():
    """Test one fused scan stores the sensor model probabilities."""
    grid = OccupancyGrid.empty(width=200, height=200)
    counts = ObservationCounts.like(grid)
    fuse_global(grid, counts, raytrace_local(_single_beam(1.0)), Pose2D(0.0, 0.0))

    assert grid.cells[100, 120] == 70
    assert grid.cells[100, 110] == 30
    assert grid.cells[101, 120] == 60
    assert counts.counts[100, 120] == 1


def test_fuse_global_rotates_local_grid():
    """Test a heading of 90 deg maps the beam onto global +y."""
    grid = OccupancyGrid.empty(width=200, height=200)
    counts = ObservationCounts.like(grid)
    fuse_global(grid, counts, raytrace_local(_single_beam(1.0)), Pose2D(0.0, 0.0, math.pi / 2))

    assert grid.cells[120, 100] == 70


def test_fuse_global_two_observations_odds_product():
    """Test two observations at p=0.9 with prior 0.5 give 81/82."""
    model = SensorModel(p_occupied=0.9)
    grid = OccupancyGrid.empty(width=200, height=200)
    counts = ObservationCounts.like(grid)
    local = raytrace_local(_single_beam(1.0))

    fuse_global(grid, counts, local, Pose2D(0.0, 0.0), model)
    fuse_global(grid, counts, local, Pose2D(0.0, 0.0), model)

    assert expit(counts.log_odds[100, 120]) == pytest.approx(81 / 82, abs=1e-12)
    assert grid.cells[100, 120] == 99
    assert counts.counts[100, 120] == 2


def test_fuse_global_out_of_bounds():
    """Test a scan reaching past the grid raises GridBoundsError."""
    grid = OccupancyGrid.empty(width=100, height=100)

    with pytest.raises(GridBoundsError):
        fuse_global(grid, ObservationCounts.like(grid), raytrace_local(_single_beam(3.0)), Pose2D(0.0, 0.0))


def test_fuse_global_shape_mismatch():
    """Test counts must match the grid."""
    grid = OccupancyGrid.empty(width=200, height=200)
    local = LocalGrid(np.full((3, 3), UNKNOWN, dtype=np.int16), 20.0, 1)

    with pytest.raises(InvalidInputError):
        fuse_global(grid, ObservationCounts(np.zeros((5, 5))), local, Pose2D(0.0, 0.0))


def test_binarize_and_thin():
    """Test a thick wall thins to a single line and unknown counts as free."""
    cells = np.full((20, 20), UNKNOWN, dtype=np.int16)
    cells[5:20, 5:15] = 0
    cells[9:12, 2:18] = 80
    thin = binarize_and_thin(OccupancyGrid(cells, origin=(0.0, 0.0)))

    assert thin.dtype == np.uint8
    assert thin[10, 4:16].all()
    assert not thin[9].any()
    assert not thin[11].any()
