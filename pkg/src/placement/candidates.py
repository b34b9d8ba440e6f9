"""Marker placement candidate generation."""
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Tuple

import numpy as np

from src.core.exceptions import InvalidInputError
from src.core.raster import Cell
from src.placement.decomposition import Rect


@dataclass
class CandidateSet:
    """Deduplicated candidate marker cells ordered by (row, col)."""

    cells: List[Cell] = field(default_factory=list)

    def __post_init__(self):
        self.cells = sorted(set((int(r), int(c)) for r, c in self.cells))

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)


def _segments(start: int, length: int, r: float) -> List[Tuple[int, int]]:
    """(start, length) of near-equal parts no longer than ``r``."""
    if length <= r:
        return [(start, length)]
    step = max(1, math.floor(r))
    parts = int(math.ceil(length / step))
    return [(int(s[0]), len(s)) for s in np.array_split(np.arange(start, start + length), parts)]


def split_rect(rect: Rect, r: float) -> List[Rect]:
    """Split each dimension longer than ``r`` into equal segments."""
    return [
        Rect.from_bounds(row0, col0, h, w)
        for row0, h in _segments(rect.row0, rect.h, r)
        for col0, w in _segments(rect.col0, rect.w, r)
    ]


def _centroid_cell(rect: Rect) -> Cell:
    return rect.row0 + (rect.h - 1) // 2, rect.col0 + (rect.w - 1) // 2


def _corner_cells(rect: Rect) -> List[Cell]:
    top, left = rect.row0, rect.col0
    bottom, right = top + rect.h - 1, left + rect.w - 1
    return [(top, left), (top, right), (bottom, left), (bottom, right)]


def generate_candidates(rects: Iterable[Rect], r: float, corner_rule: bool = True) -> CandidateSet:
    """
    Candidate marker cells for a rectangular decomposition.

    Rectangles are split along every dimension exceeding ``r`` and the
    centroid of each part becomes a candidate. Parts smaller than ``r / 2``
    in both dimensions also contribute their four corners.

    Args:
        rects: Rectangles from the decomposition
        r: Marker range in cells
        corner_rule: Add corners of small parts

    Returns:
        Deduplicated candidates
    """
    if not r > 0:
        raise InvalidInputError(f"Marker range must be positive, got {r}")
    cells: List[Cell] = []
    for rect in rects:
        for part in split_rect(rect, r):
            cells.append(_centroid_cell(part))
            if corner_rule and part.w < r / 2 and part.h < r / 2:
                cells.extend(_corner_cells(part))
    return CandidateSet(cells)
