"""Rectangular decomposition of an orthogonal binary map."""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import ndimage

from src.core.exceptions import InvalidInputError

logger = logging.getLogger("markernav")


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle of cells; ``x``/``y`` is the centroid (col, row)."""

    x: float
    y: float
    w: int
    h: int

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise InvalidInputError(f"Rectangle must have positive size, got {self.w}x{self.h}")

    @classmethod
    def from_bounds(cls, row0: int, col0: int, h: int, w: int) -> "Rect":
        return cls(x=col0 + (w - 1) / 2.0, y=row0 + (h - 1) / 2.0, w=w, h=h)

    @property
    def col0(self) -> int:
        return int(round(self.x - (self.w - 1) / 2.0))

    @property
    def row0(self) -> int:
        return int(round(self.y - (self.h - 1) / 2.0))

    def slices(self) -> Tuple[slice, slice]:
        return slice(self.row0, self.row0 + self.h), slice(self.col0, self.col0 + self.w)


def _validate_binary(binary: np.ndarray) -> np.ndarray:
    binary = np.asarray(binary)
    if binary.ndim != 2 or binary.size == 0:
        raise InvalidInputError("Map must be a non-empty 2D array")
    if not np.isin(binary, (0, 1)).all():
        raise InvalidInputError("Map must be binary (0 free, 1 obstacle)")
    return binary.astype(bool)


def traversable_region(binary: np.ndarray) -> np.ndarray:
    """Free cells enclosed by obstacles: 4-connected free components not touching the map edge."""
    free = ~_validate_binary(binary)
    labels, _ = ndimage.label(free)
    edge_labels = np.unique(np.concatenate([
        labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1],
    ]))
    return free & ~np.isin(labels, edge_labels[edge_labels > 0])


def _vertical_runs(column: np.ndarray) -> List[Tuple[int, int]]:
    """Maximal [start, end) runs of True cells."""
    padded = np.concatenate([[False], column, [False]]).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    return list(zip(edges[::2].tolist(), edges[1::2].tolist()))


def _sweep(free: np.ndarray, row_offset: int = 0, col_offset: int = 0) -> List[Rect]:
    open_rects: Dict[Tuple[int, int], int] = {}
    rects: List[Rect] = []
    width = free.shape[1]
    for col in range(width + 1):
        runs = set(_vertical_runs(free[:, col])) if col < width else set()
        for run in sorted(set(open_rects) - runs):
            start_col = open_rects.pop(run)
            rects.append(Rect.from_bounds(
                run[0] + row_offset, start_col + col_offset, run[1] - run[0], col - start_col,
            ))
        for run in sorted(runs - set(open_rects)):
            open_rects[run] = col
    return rects


def rectangular_decomposition(
    binary: np.ndarray,
    traversable: Optional[np.ndarray] = None,
) -> List[Rect]:
    """
    Decompose the free space of a binary map into rectangles.

    The map is swept left to right. Each maximal vertical run of free cells
    opens a rectangle, which grows while the next column repeats the same
    run and closes when it does not or at the map end. Rectangles outside
    the traversable region are dropped and the rest are trimmed to it.

    Args:
        binary: Map with 1 for obstacles and 0 for free cells
        traversable: Cells the robot can reach; defaults to
            :func:`traversable_region`

    Returns:
        Rectangles ordered by (row, col) of their top-left cell; their
        union equals the traversable free cells
    """
    obstacles = _validate_binary(binary)
    if traversable is None:
        traversable = traversable_region(binary)
    traversable = np.asarray(traversable, dtype=bool) & ~obstacles

    rects = _sweep(~obstacles)
    kept: List[Rect] = []
    for rect in rects:
        inside = traversable[rect.slices()]
        if inside.all():
            kept.append(rect)
        elif inside.any():
            kept.extend(_sweep(inside, rect.row0, rect.col0))
    kept.sort(key=lambda r: (r.row0, r.col0))
    logger.debug(f"Decomposition: {len(rects)} rectangles swept, {len(kept)} kept")
    return kept
