"""Tests for grid raster helpers."""
import numpy as np

from src.core.raster import cell_center, dda_line, line_of_sight, visible_within, world_to_cell


def test_world_to_cell_and_center():
    """Test world points map to cells and back to cell centers."""
    origin = (10.0, 20.0)

    assert world_to_cell(0.0, 0.0, 20.0, origin) == (20, 10)
    assert world_to_cell(-0.01, 0.26, 20.0, origin) == (25, 9)
    x, y = cell_center(20, 10, 20.0, origin)
    assert (x, y) == (0.025, 0.025)


def test_dda_line_endpoints_and_connectivity():
    """Test dda_line includes both endpoints and steps one cell at a time."""
    line = dda_line((0, 0), (3, 7))

    assert line[0] == (0, 0)
    assert line[-1] == (3, 7)
    assert len(line) == 8
    for (r0, c0), (r1, c1) in zip(line, line[1:]):
        assert max(abs(r1 - r0), abs(c1 - c0)) == 1


def test_dda_line_single_cell():
    """Test dda_line of a cell to itself."""
    assert dda_line((4, 4), (4, 4)) == [(4, 4)]


def test_line_of_sight_ignores_endpoints():
    """Test blocking cells only matter strictly between the endpoints."""
    blocking = np.zeros((5, 5), dtype=bool)
    blocking[2, 0] = True
    blocking[2, 4] = True

    assert line_of_sight(blocking, (2, 0), (2, 4))
    blocking[2, 2] = True
    assert not line_of_sight(blocking, (2, 0), (2, 4))


def test_visible_within_matches_brute_force():
    """Test visible_within equals a per-cell line-of-sight check."""
    rng = np.random.default_rng(3)
    free = rng.random((24, 24)) > 0.2
    origin = (12, 12)
    free[origin] = True
    radius = 7.5

    mask = visible_within(free, origin, radius)

    expected = np.zeros_like(free)
    for row in range(24):
        for col in range(24):
            in_disk = (row - 12) ** 2 + (col - 12) ** 2 <= radius ** 2
            if free[row, col] and in_disk and line_of_sight(~free, origin, (row, col)):
                expected[row, col] = True
    np.testing.assert_array_equal(mask, expected)


def test_visible_within_blocked_by_wall():
    """Test a full wall hides the cells behind it."""
    free = np.ones((11, 11), dtype=bool)
    free[:, 6] = False

    mask = visible_within(free, (5, 2), 10.0)

    assert mask[5, 5]
    assert not mask[:, 6:].any()
