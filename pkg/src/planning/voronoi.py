"""Clearance map, Voronoi skeleton and skeleton graph."""
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Optional, Tuple

import numpy as np
from scipy import ndimage
from skimage.morphology import medial_axis

from src.core.exceptions import InvalidInputError
from src.core.raster import Cell

SQRT2 = math.sqrt(2.0)
_NEIGHBOURS = [(dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0)]
SPUR_RATIO = 2.0


@dataclass(frozen=True, eq=False)
class ClearanceMap:
    """Euclidean distance (cells) from every cell to the nearest obstacle."""

    distances: np.ndarray

    @property
    def free(self) -> np.ndarray:
        return self.distances > 0


def clearance_map(binary: np.ndarray) -> ClearanceMap:
    """
    Exact Euclidean distance transform of the free space.

    A map without obstacles measures clearance to a wall just outside its
    border.

    Args:
        binary: Map with 1 (or True) for obstacles

    Returns:
        Clearance map, zero on obstacles

    Raises:
        InvalidInputError: If the map has no free cell
    """
    obstacles = np.asarray(binary).astype(bool)
    if obstacles.all():
        raise InvalidInputError("Map has no free cell")
    if obstacles.any():
        return ClearanceMap(ndimage.distance_transform_edt(~obstacles))
    walled = np.pad(obstacles, 1, constant_values=True)
    return ClearanceMap(ndimage.distance_transform_edt(~walled)[1:-1, 1:-1])


def voronoi_boundaries(clearance: ClearanceMap) -> np.ndarray:
    """Medial-axis ridge of the clearance map as a boolean skeleton mask."""
    return medial_axis(np.pad(clearance.free, 1))[1:-1, 1:-1]


def _degrees(skeleton: np.ndarray) -> np.ndarray:
    kernel = np.ones((3, 3), dtype=int)
    kernel[1, 1] = 0
    return ndimage.convolve(skeleton.astype(int), kernel, mode="constant") * skeleton


def _trace_spur(
    skeleton: np.ndarray, degrees: np.ndarray, end: Cell
) -> Tuple[List[Cell], float, Optional[Cell]]:
    """Cells and length from an end cell up to (not including) its junction."""
    height, width = skeleton.shape
    cells, length, previous, current = [end], 0.0, None, end
    while True:
        steps = [
            (current[0] + dr, current[1] + dc)
            for dr, dc in _NEIGHBOURS
            if 0 <= current[0] + dr < height
            and 0 <= current[1] + dc < width
            and skeleton[current[0] + dr, current[1] + dc]
            and (current[0] + dr, current[1] + dc) != previous
            and (current[0] + dr, current[1] + dc) not in cells
        ]
        if not steps:
            return cells, length, None
        step = min(steps, key=lambda c: abs(c[0] - current[0]) + abs(c[1] - current[1]))
        length += SQRT2 if step[0] != current[0] and step[1] != current[1] else 1.0
        if degrees[step] >= 3:
            return cells, length, step
        previous, current = current, step
        cells.append(current)


def prune_spurs(skeleton: np.ndarray, clearance: ClearanceMap, ratio: float = SPUR_RATIO) -> np.ndarray:
    """
    Drop end branches that are short next to the clearance at their junction.

    Such spurs run into the corners at the closed end of a corridor. A
    component keeps its spurs when what would remain is shorter than the
    longest of them, so a lone star (an empty square room) survives whole.

    Args:
        skeleton: Boolean skeleton mask
        clearance: Clearance map the skeleton was extracted from
        ratio: Largest spur length as a multiple of the junction clearance

    Returns:
        Pruned skeleton mask
    """
    skeleton = np.asarray(skeleton, dtype=bool)
    degrees = _degrees(skeleton)
    labels, _ = ndimage.label(skeleton, structure=np.ones((3, 3), dtype=bool))
    spurs: Dict[int, List[Tuple[List[Cell], float]]] = defaultdict(list)
    for row, col in zip(*np.nonzero(degrees == 1)):
        cells, length, junction = _trace_spur(skeleton, degrees, (int(row), int(col)))
        if junction is not None and length <= ratio * clearance.distances[junction]:
            spurs[labels[row, col]].append((cells, length))

    pruned = skeleton.copy()
    for label, found in spurs.items():
        removed = {cell for cells, _ in found for cell in cells}
        remaining = int((labels == label).sum()) - len(removed)
        if remaining <= max(length for _, length in found):
            continue
        for row, col in removed:
            pruned[row, col] = False
    return pruned


@dataclass
class VoronoiGraph:
    """Weighted undirected graph; skeleton graphs use cell nodes and 8-neighbour edges."""

    adjacency: Dict[Hashable, List[Tuple[Hashable, float]]] = field(default_factory=dict)
    resolution: float = 20.0
    origin: Tuple[float, float] = (0.0, 0.0)

    @property
    def nodes(self) -> List[Hashable]:
        return sorted(self.adjacency)

    def __len__(self) -> int:
        return len(self.adjacency)

    def neighbours(self, node: Hashable) -> List[Tuple[Hashable, float]]:
        return self.adjacency.get(node, [])

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[Tuple[Hashable, Hashable, float]],
        nodes: Iterable[Hashable] = (),
    ) -> "VoronoiGraph":
        adjacency: Dict[Hashable, List[Tuple[Hashable, float]]] = defaultdict(list)
        for node in nodes:
            adjacency.setdefault(node, [])
        for a, b, weight in edges:
            if not weight > 0:
                raise InvalidInputError(f"Edge weight must be positive, got {weight}")
            adjacency[a].append((b, float(weight)))
            adjacency[b].append((a, float(weight)))
        return cls({k: sorted(v) for k, v in adjacency.items()})

    @classmethod
    def from_skeleton(
        cls,
        skeleton: np.ndarray,
        resolution: float = 20.0,
        origin: Tuple[float, float] = (0.0, 0.0),
    ) -> "VoronoiGraph":
        """8-connected graph over skeleton cells with weights 1 and sqrt(2)."""
        skeleton = np.asarray(skeleton, dtype=bool)
        height, width = skeleton.shape
        adjacency: Dict[Hashable, List[Tuple[Hashable, float]]] = {}
        for row, col in zip(*np.nonzero(skeleton)):
            node = (int(row), int(col))
            links = []
            for dr, dc in _NEIGHBOURS:
                r, c = node[0] + dr, node[1] + dc
                if 0 <= r < height and 0 <= c < width and skeleton[r, c]:
                    links.append(((r, c), SQRT2 if dr and dc else 1.0))
            adjacency[node] = links
        return cls(adjacency, resolution, origin)


def build_graph(
    binary: np.ndarray,
    resolution: float = 20.0,
    origin: Tuple[float, float] = (0.0, 0.0),
    region: Optional[np.ndarray] = None,
) -> Tuple[ClearanceMap, np.ndarray, VoronoiGraph]:
    """Clearance, skeleton and skeleton graph of a binary map, optionally kept to a region."""
    clearance = clearance_map(binary)
    skeleton = restrict_to(prune_spurs(voronoi_boundaries(clearance), clearance), region)
    return clearance, skeleton, VoronoiGraph.from_skeleton(skeleton, resolution, origin)


def restrict_to(skeleton: np.ndarray, region: Optional[np.ndarray]) -> np.ndarray:
    """Skeleton cells inside a region (all of them when ``region`` is None)."""
    if region is None:
        return skeleton
    return skeleton & np.asarray(region, dtype=bool)
