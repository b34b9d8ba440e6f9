"""Marker coverage, redundant-marker reduction and path association."""
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from scipy import ndimage

from src.core.exceptions import (
    CoverageViolationError,
    InfeasibleCoverageError,
    InvalidInputError,
)
from src.core.raster import Cell, visible_within
from src.placement.candidates import generate_candidates
from src.placement.decomposition import rectangular_decomposition

logger = logging.getLogger("markernav")


def coverage_raytrace(free: np.ndarray, candidate: Cell, r: float) -> np.ndarray:
    """
    Free cells a marker at ``candidate`` covers.

    A cell is covered when it lies within ``r`` cells of the candidate and
    the discrete line between them crosses no obstacle.

    Raises:
        InfeasibleCoverageError: If the candidate is not a free cell
    """
    free = np.asarray(free, dtype=bool)
    row, col = candidate
    if not (0 <= row < free.shape[0] and 0 <= col < free.shape[1]) or not free[row, col]:
        raise InfeasibleCoverageError(f"Candidate {candidate} is not in free space")
    return visible_within(free, candidate, r)


@dataclass
class CoverageMask:
    """Per-candidate covered cells over a free-space mask."""

    free: np.ndarray
    candidates: List[Cell]
    masks: List[np.ndarray]

    @classmethod
    def build(cls, free: np.ndarray, candidates: Iterable[Cell], r: float) -> "CoverageMask":
        free = np.asarray(free, dtype=bool)
        candidates = list(candidates)
        return cls(free, candidates, [coverage_raytrace(free, c, r) for c in candidates])

    def counts(self) -> np.ndarray:
        """Number of candidates covering each cell."""
        total = np.zeros(self.free.shape, dtype=np.int32)
        for mask in self.masks:
            total += mask
        return total

    def fraction(self) -> float:
        """Share of free cells covered by at least one candidate."""
        n_free = int(self.free.sum())
        if n_free == 0:
            return 1.0
        return float(((self.counts() > 0) & self.free).sum()) / n_free

    def uncovered(self) -> List[Cell]:
        rows, cols = np.nonzero(self.free & (self.counts() == 0))
        return list(zip(rows.tolist(), cols.tolist()))


@dataclass
class ReductionResult:
    """Markers kept after reduction, in (row, col) order; ids are list positions."""

    cells: List[Cell]
    coverage: CoverageMask
    removed: List[Cell]


def reduce_markers(
    candidates: Sequence[Cell],
    free: np.ndarray,
    r: float,
    clearance: Optional[np.ndarray] = None,
) -> ReductionResult:
    """
    Greedily remove redundant candidates while keeping full coverage.

    Candidates are ranked by clearance, largest first. Each round removes,
    among the candidates whose every covered cell is also covered by another
    candidate, the one with the smallest coverage, which keeps the largest
    remaining overlap. Ties go to the lower clearance, then the lower
    (row, col), which is (y, x), then the lower input index. Rounds stop
    when no single removal keeps full coverage.

    Args:
        candidates: Candidate cells
        free: Free-space mask to cover
        r: Marker range in cells
        clearance: Distance-to-obstacle map; computed from ``free`` if omitted

    Returns:
        Kept markers and their coverage

    Raises:
        InfeasibleCoverageError: If the candidates do not cover every free cell
    """
    free = np.asarray(free, dtype=bool)
    if not candidates:
        raise InvalidInputError("No candidates to reduce")
    if clearance is None:
        clearance = ndimage.distance_transform_edt(free)
    coverage = CoverageMask.build(free, candidates, r)
    uncovered = coverage.uncovered()
    if uncovered:
        raise InfeasibleCoverageError("Candidates do not cover all free cells", uncovered)

    order = sorted(
        range(len(coverage.candidates)),
        key=lambda i: (-clearance[coverage.candidates[i]], coverage.candidates[i], i),
    )
    alive = list(order)
    sizes = {i: int(coverage.masks[i].sum()) for i in order}
    counts = coverage.counts()
    removed: List[Cell] = []
    while len(alive) > 1:
        removable = [i for i in alive if np.all(counts[coverage.masks[i]] >= 2)]
        if not removable:
            break
        victim = min(
            removable,
            key=lambda i: (sizes[i], clearance[coverage.candidates[i]], coverage.candidates[i], i),
        )
        counts -= coverage.masks[victim]
        alive.remove(victim)
        removed.append(coverage.candidates[victim])

    kept = sorted(alive, key=lambda i: (coverage.candidates[i], i))
    result = CoverageMask(free, [coverage.candidates[i] for i in kept], [coverage.masks[i] for i in kept])
    logger.info(f"Reduced {len(candidates)} candidates to {len(kept)} markers (r={r:.1f} cells)")
    return ReductionResult(cells=result.candidates, coverage=result, removed=removed)


def associate_path_points(
    points: Iterable[Cell],
    markers: Sequence[Cell],
    masks: Sequence[np.ndarray],
) -> Dict[Cell, int]:
    """
    Assign each path point to the nearest marker that covers it.

    Args:
        points: Path cells
        markers: Marker cells; a marker's id is its index
        masks: Coverage mask of each marker

    Returns:
        Path cell -> marker id

    Raises:
        CoverageViolationError: If a point is not covered by any marker
    """
    assignment: Dict[Cell, int] = {}
    for point in points:
        point = (int(point[0]), int(point[1]))
        best = None
        for marker_id, (cell, mask) in enumerate(zip(markers, masks)):
            if not mask[point]:
                continue
            distance = math.hypot(point[0] - cell[0], point[1] - cell[1])
            if best is None or distance < best[0]:
                best = (distance, marker_id)
        if best is None:
            raise CoverageViolationError(f"Path point {point} is not covered by any marker")
        assignment[point] = best[1]
    return assignment


@dataclass
class CoverageReport:
    """Coverage summary of a marker placement."""

    total_free: int
    covered: List[int]
    histogram: Dict[int, int]
    range_cells: float

    @classmethod
    def from_mask(cls, coverage: CoverageMask, range_cells: float) -> "CoverageReport":
        counts = coverage.counts()[coverage.free]
        values, freq = np.unique(counts, return_counts=True)
        return cls(
            total_free=int(coverage.free.sum()),
            covered=[int(m.sum()) for m in coverage.masks],
            histogram={int(v): int(f) for v, f in zip(values, freq)},
            range_cells=range_cells,
        )

    def to_text(self) -> str:
        lines = [
            f"range_cells: {self.range_cells:g}",
            f"total_free_cells: {self.total_free}",
            f"markers: {len(self.covered)}",
            "",
            "marker_id covered_cells",
        ]
        lines += [f"{i} {n}" for i, n in enumerate(self.covered)]
        lines += ["", "markers_covering cells"]
        lines += [f"{k} {v}" for k, v in sorted(self.histogram.items())]
        return "\n".join(lines) + "\n"


def place_markers(
    binary: np.ndarray,
    free: np.ndarray,
    r: float,
    corner_rule: bool = True,
) -> ReductionResult:
    """
    Full placement: decompose, generate candidates and reduce them.

    Args:
        binary: Map with 1 for obstacles
        free: Traversable cells that must be covered
        r: Marker range in cells

    Returns:
        Reduced marker set covering every free cell
    """
    free = np.asarray(free, dtype=bool)
    rects = rectangular_decomposition(binary, free)
    candidates = generate_candidates(rects, r, corner_rule)
    logger.debug(f"{len(rects)} rectangles gave {len(candidates)} candidates at r={r:.1f} cells")
    clearance = ndimage.distance_transform_edt(~np.asarray(binary, dtype=bool))
    return reduce_markers(list(candidates), free, r, clearance)
