"""Tests for the world model and laser simulation."""
import numpy as np
import pytest

from src.core.exceptions import InvalidInputError, InvalidPoseError
from src.core.models import Marker, Pose2D
from src.sim.world import LaserSpec, WorldModel, simulate_scan
from src.sim.worlds import rasterize_floor_plan


def _room() -> WorldModel:
    obstacles, free, origin = rasterize_floor_plan([(-0.5, -0.5, 3.5, 3.5)])
    return WorldModel(obstacles, free, 20.0, origin)


def test_laser_bearings_span_fov():
    """Test beams are spread evenly over the field of view."""
    bearings = LaserSpec(fov_deg=240.0, beam_count=481).bearings()

    assert bearings[0] == pytest.approx(-np.radians(120.0))
    assert bearings[-1] == pytest.approx(np.radians(120.0))
    assert LaserSpec(beam_count=1).bearings().tolist() == [0.0]


def test_world_rejects_overlapping_masks():
    """Test a cell cannot be free and obstacle at once."""
    mask = np.ones((4, 4), dtype=bool)

    with pytest.raises(InvalidInputError):
        WorldModel(mask, mask)


def test_world_rejects_marker_outside_free_space():
    """Test markers must stand in free space."""
    obstacles, free, origin = rasterize_floor_plan([(0.0, 0.0, 1.0, 1.0)])

    with pytest.raises(InvalidInputError):
        WorldModel(obstacles, free, 20.0, origin, [Marker(id=0, pose=Pose2D(5.0, 5.0))])


def test_world_occupancy_cells():
    """Test ground truth converts to occupancy values."""
    world = _room()
    cells = world.occupancy_cells()

    assert set(np.unique(cells).tolist()) == {-1, 0, 100}
    assert np.array_equal(cells == 100, world.obstacles)
    assert np.array_equal(cells == 0, world.free)


def test_world_is_free():
    """Test point queries against the free mask."""
    world = _room()

    assert world.is_free(1.0, 1.0)
    assert not world.is_free(3.6, 1.0)
    assert not world.is_free(-50.0, 0.0)


def test_simulate_scan_hits_walls():
    """Test straight beams return the exact wall distance."""
    world = _room()
    spec = LaserSpec(beam_count=1)

    ahead = simulate_scan(world, Pose2D(1.0, 1.0, 0.0), spec, rng_seed=0)
    behind = simulate_scan(world, Pose2D(1.0, 1.0, np.pi), spec, rng_seed=0)

    assert ahead[0] == pytest.approx(2.5)
    assert behind[0] == pytest.approx(1.5)


def test_simulate_scan_beyond_max_range_is_inf():
    """Test beams without a return within range report infinity."""
    scan = simulate_scan(_room(), Pose2D(1.0, 1.0, 0.0), LaserSpec(beam_count=1, max_range=1.0), rng_seed=0)

    assert np.isinf(scan[0])


def test_simulate_scan_is_seeded():
    """Test noise and corruption depend only on the seed."""
    world = _room()
    spec = LaserSpec(range_sigma=0.02, nan_rate=0.1, inf_rate=0.1)
    pose = Pose2D(1.5, 1.5, 0.3)

    first = simulate_scan(world, pose, spec, rng_seed=7)
    second = simulate_scan(world, pose, spec, rng_seed=7)
    other = simulate_scan(world, pose, spec, rng_seed=8)

    assert np.array_equal(first, second, equal_nan=True)
    assert not np.array_equal(first, other, equal_nan=True)


def test_simulate_scan_full_corruption():
    """Test a NaN rate of one corrupts every beam."""
    scan = simulate_scan(_room(), Pose2D(1.0, 1.0), LaserSpec(nan_rate=1.0), rng_seed=0)

    assert np.isnan(scan).all()


def test_simulate_scan_outside_free_space():
    """Test scanning from inside a wall raises InvalidPoseError."""
    with pytest.raises(InvalidPoseError):
        simulate_scan(_room(), Pose2D(3.52, 1.0), LaserSpec(), rng_seed=0)
