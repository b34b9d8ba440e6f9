"""Tests for the built-in synthetic worlds."""
import math

import numpy as np
import pytest
from scipy import ndimage

from src.core.exceptions import ConfigurationError
from src.sim.worlds import SYNTHETIC_WORLDS, corridor, rasterize_floor_plan, synthetic_world


def test_rasterize_floor_plan_closes_free_space():
    """Test every free cell is surrounded by free or wall cells."""
    obstacles, free, origin = rasterize_floor_plan([(0.0, 0.0, 2.0, 1.0), (1.0, 0.0, 2.0, 3.0)])

    closed = ndimage.binary_dilation(free, structure=np.ones((3, 3), dtype=bool))
    assert not (free & obstacles).any()
    assert np.array_equal(closed, free | obstacles)
    assert origin == (4.0, 4.0)


def test_rasterize_floor_plan_holes():
    """Test holes are cut out of the free area."""
    _, free, origin = rasterize_floor_plan([(0.0, 0.0, 2.0, 2.0)], holes=[(0.5, 0.5, 1.0, 1.0)])

    assert not free[int(0.75 * 20 + origin[1]), int(0.75 * 20 + origin[0])]


@pytest.mark.parametrize("name", sorted(SYNTHETIC_WORLDS))
def test_synthetic_worlds_are_consistent(name):
    """Test every world anchors marker 0 at the origin and routes through free space."""
    built = synthetic_world(name)
    world = built.world

    anchor = min(world.markers, key=lambda m: m.id)
    assert anchor.id == 0
    assert (anchor.pose.x, anchor.pose.y) == (0.0, 0.0)
    assert anchor.pose.theta == pytest.approx(math.pi)
    assert built.route
    for pose in built.route + built.loop:
        assert world.is_free(pose.x, pose.y)


def test_corridor_dimensions():
    """Test the corridor width and marker spacing."""
    built = corridor(length_m=10.0, width_m=2.16)
    free_rows = built.world.free.any(axis=1).sum()

    assert free_rows == round(2.16 * 20)
    assert [m.pose.x for m in built.world.markers] == [0.0, 3.0, 6.0, 9.0]


def test_unknown_world():
    """Test an unknown world name raises ConfigurationError."""
    with pytest.raises(ConfigurationError):
        synthetic_world("atrium")
