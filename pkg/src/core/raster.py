"""Grid raster helpers shared by simulation, mapping and placement.

Cells are addressed ``(row, col)`` with row growing with world y. A grid's
``origin`` is the (col, row) cell coordinate of the world origin, so cell
``(row, col)`` covers ``x in [(col - origin_col) / res, (col + 1 - origin_col) / res)``.
"""
import math
from typing import List, Tuple

import numpy as np

Cell = Tuple[int, int]


def world_to_cell(x: float, y: float, resolution: float, origin: Tuple[float, float]) -> Cell:
    """Cell containing a world point."""
    return (
        int(math.floor(y * resolution + origin[1])),
        int(math.floor(x * resolution + origin[0])),
    )


def cell_center(row: int, col: int, resolution: float, origin: Tuple[float, float]) -> Tuple[float, float]:
    """World coordinates of a cell center."""
    return (
        (col + 0.5 - origin[0]) / resolution,
        (row + 0.5 - origin[1]) / resolution,
    )


def _round_div(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    # round(num / den) with halves rounded up, exact in integers
    return np.floor_divide(2 * num + den, 2 * den)


def dda_line(start: Cell, end: Cell) -> List[Cell]:
    """Discrete line from ``start`` to ``end`` inclusive (rounding DDA)."""
    r0, c0 = start
    dr, dc = end[0] - r0, end[1] - c0
    n = max(abs(dr), abs(dc))
    if n == 0:
        return [start]
    k = np.arange(n + 1)
    rows = r0 + _round_div(dr * k, np.full_like(k, n))
    cols = c0 + _round_div(dc * k, np.full_like(k, n))
    return list(zip(rows.tolist(), cols.tolist()))


def line_of_sight(blocking: np.ndarray, start: Cell, end: Cell) -> bool:
    """True when no blocking cell lies on the discrete line (endpoints excluded)."""
    for row, col in dda_line(start, end)[1:-1]:
        if blocking[row, col]:
            return False
    return True


def visible_within(free: np.ndarray, origin: Cell, radius: float) -> np.ndarray:
    """Free cells within ``radius`` cells of ``origin`` with a clear discrete line.

    Vectorized over all target cells; each target uses the same line as
    :func:`dda_line`, so the result equals a per-cell brute force.
    """
    height, width = free.shape
    r0, c0 = origin
    reach = int(math.floor(radius))
    row_lo, row_hi = max(0, r0 - reach), min(height - 1, r0 + reach)
    col_lo, col_hi = max(0, c0 - reach), min(width - 1, c0 + reach)
    rows, cols = np.mgrid[row_lo:row_hi + 1, col_lo:col_hi + 1]
    dr = rows - r0
    dc = cols - c0
    in_disk = (dr * dr + dc * dc) <= radius * radius
    target = in_disk & free[rows, cols]

    tr, tc = dr[target], dc[target]
    n = np.maximum(np.abs(tr), np.abs(tc))
    safe_n = np.maximum(n, 1)
    visible = np.ones(tr.shape, dtype=bool)
    blocking = ~free
    for k in range(1, int(n.max(initial=0))):
        active = (n > k) & visible
        if not active.any():
            continue
        step_r = r0 + _round_div(tr[active] * k, safe_n[active])
        step_c = c0 + _round_div(tc[active] * k, safe_n[active])
        hit = blocking[step_r, step_c]
        idx = np.flatnonzero(active)
        visible[idx[hit]] = False

    mask = np.zeros_like(free, dtype=bool)
    mask[rows[target][visible], cols[target][visible]] = True
    return mask
