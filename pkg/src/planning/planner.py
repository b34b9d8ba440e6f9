"""Shortest paths on the skeleton graph."""
import heapq
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from src.core.exceptions import InvalidEndpointError, NoPathError
from src.core.models import Pose2D
from src.core.raster import Cell, cell_center, world_to_cell
from src.planning.voronoi import VoronoiGraph

logger = logging.getLogger("markernav")


@dataclass
class PathPlan:
    """Ordered waypoints with headings toward the successor."""

    waypoints: List[Pose2D] = field(default_factory=list)
    length: float = 0.0  # meters
    cells: List[Cell] = field(default_factory=list)

    def points(self) -> np.ndarray:
        """(N, 2) waypoint positions."""
        return np.array([[p.x, p.y] for p in self.waypoints], dtype=float).reshape(-1, 2)


def dijkstra(graph: VoronoiGraph, src: Hashable, dst: Hashable) -> Tuple[float, List[Hashable]]:
    """
    Shortest path between two graph nodes.

    Equal-cost ties are resolved by the lexicographic order of the queued
    nodes.

    Returns:
        (length, node sequence from src to dst)

    Raises:
        NoPathError: If dst is not reachable from src
    """
    if src not in graph.adjacency or dst not in graph.adjacency:
        raise NoPathError(f"Node {src if src not in graph.adjacency else dst} is not in the graph")
    dist: Dict[Hashable, float] = {src: 0.0}
    previous: Dict[Hashable, Hashable] = {}
    visited = set()
    queue = [(0.0, src)]
    while queue:
        distance, current = heapq.heappop(queue)
        if current in visited:
            continue
        visited.add(current)
        if current == dst:
            break
        for neighbour, weight in graph.neighbours(current):
            relaxed = distance + weight
            if neighbour not in dist or relaxed < dist[neighbour]:
                dist[neighbour] = relaxed
                previous[neighbour] = current
                heapq.heappush(queue, (relaxed, neighbour))

    if dst not in visited:
        raise NoPathError(f"No path from {src} to {dst}")
    path = [dst]
    while path[-1] != src:
        path.append(previous[path[-1]])
    path.reverse()
    return dist[dst], path


def simplify_path(cells: Sequence[Cell], tolerance: float = 0.0) -> List[Cell]:
    """
    Drop interior cells lying on the segment between kept neighbours.

    With ``tolerance`` 0 only exactly collinear runs collapse; a positive
    tolerance (cells) allows that much deviation.
    """
    cells = list(cells)
    if len(cells) <= 2:
        return cells
    kept = [cells[0]]
    anchor = 0
    for i in range(1, len(cells) - 1):
        a = np.asarray(cells[anchor], dtype=float)
        d = np.asarray(cells[i + 1], dtype=float) - a
        norm = math.hypot(d[0], d[1])
        deviations = []
        for j in range(anchor + 1, i + 1):
            p = np.asarray(cells[j], dtype=float) - a
            deviations.append(abs(d[0] * p[1] - d[1] * p[0]) / norm)
        if max(deviations) > tolerance + 1e-12:
            kept.append(cells[i])
            anchor = i
    kept.append(cells[-1])
    return kept


def _endpoint_cell(graph: VoronoiGraph, pose: Pose2D, free: Optional[np.ndarray], label: str) -> Cell:
    cell = world_to_cell(pose.x, pose.y, graph.resolution, graph.origin)
    if free is not None:
        inside = 0 <= cell[0] < free.shape[0] and 0 <= cell[1] < free.shape[1]
        if not inside or not free[cell]:
            raise InvalidEndpointError(
                f"{label} ({pose.x:.2f}, {pose.y:.2f}) is not in free space"
            )
    return cell


def plan_path(
    graph: VoronoiGraph,
    src: Pose2D,
    dst: Pose2D,
    free: Optional[np.ndarray] = None,
    simplify_tolerance: float = 0.0,
) -> PathPlan:
    """
    Plan a path along the skeleton between two poses.

    Both endpoints snap to their nearest skeleton node; the Dijkstra path
    between the snapped nodes is simplified and converted to waypoints
    facing their successor, the last one taking the destination heading.

    Args:
        graph: Skeleton graph with cell nodes
        src: Start pose
        dst: Destination pose
        free: Free-space mask the endpoints must lie in
        simplify_tolerance: Collinearity tolerance in cells

    Returns:
        Path plan

    Raises:
        InvalidEndpointError: If an endpoint is outside free space
        NoPathError: If the snapped endpoints are not connected
    """
    if len(graph) == 0:
        raise NoPathError("Skeleton graph is empty")
    src_cell = _endpoint_cell(graph, src, free, "Source")
    dst_cell = _endpoint_cell(graph, dst, free, "Destination")

    nodes = graph.nodes
    tree = cKDTree(np.asarray(nodes, dtype=float))
    _, (src_idx, dst_idx) = tree.query([src_cell, dst_cell])
    length_cells, path = dijkstra(graph, nodes[src_idx], nodes[dst_idx])

    cells = simplify_path(path, simplify_tolerance)
    centers = [cell_center(r, c, graph.resolution, graph.origin) for r, c in cells]
    waypoints = []
    for i, (x, y) in enumerate(centers):
        if i + 1 < len(centers):
            nx, ny = centers[i + 1]
            heading = math.atan2(ny - y, nx - x)
        else:
            heading = dst.theta
        waypoints.append(Pose2D(x, y, heading))
    logger.debug(f"Planned {len(path)} skeleton cells, {len(cells)} waypoints")
    return PathPlan(waypoints=waypoints, length=length_cells / graph.resolution, cells=list(path))
