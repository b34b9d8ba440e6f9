"""Tests for skeleton path planning."""
import math

import numpy as np
import pytest

from src.core.exceptions import InvalidEndpointError, NoPathError
from src.core.models import Pose2D
from src.planning.planner import dijkstra, plan_path, simplify_path
from src.planning.voronoi import VoronoiGraph, build_graph
from src.sim.worlds import corridor, lab

RES = 20.0


def _cell_pose(row: int, col: int, theta: float = 0.0) -> Pose2D:
    return Pose2D((col + 0.5) / RES, (row + 0.5) / RES, theta)


def _l_skeleton() -> np.ndarray:
    skeleton = np.zeros((10, 10), dtype=bool)
    skeleton[2, 2:8] = True
    skeleton[2:8, 7] = True
    return skeleton


def test_dijkstra_shortest_path():
    """Test the cheaper two-hop route wins over a heavy direct edge."""
    graph = VoronoiGraph.from_edges([("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 3.0)])

    length, path = dijkstra(graph, "a", "c")

    assert length == 2.0
    assert path == ["a", "b", "c"]


def test_dijkstra_same_node():
    """Test a path from a node to itself is empty."""
    graph = VoronoiGraph.from_edges([("a", "b", 1.0)])

    assert dijkstra(graph, "a", "a") == (0.0, ["a"])


def test_dijkstra_disconnected():
    """Test unreachable nodes raise NoPathError."""
    graph = VoronoiGraph.from_edges([("a", "b", 1.0), ("c", "d", 1.0)])

    with pytest.raises(NoPathError):
        dijkstra(graph, "a", "d")


def test_dijkstra_unknown_node():
    """Test nodes missing from the graph raise NoPathError."""
    graph = VoronoiGraph.from_edges([("a", "b", 1.0)])

    with pytest.raises(NoPathError):
        dijkstra(graph, "a", "z")


def test_simplify_path_collinear():
    """Test straight runs collapse to their ends."""
    cells = [(0, 0), (0, 1), (0, 2), (1, 3), (2, 4), (3, 4)]

    assert simplify_path(cells) == [(0, 0), (0, 2), (2, 4), (3, 4)]
    assert simplify_path(cells[:2]) == cells[:2]


def test_simplify_path_tolerance():
    """Test a tolerance absorbs small zigzags."""
    cells = [(0, 0), (1, 1), (0, 2), (1, 3), (0, 4)]

    assert simplify_path(cells) == cells
    assert simplify_path(cells, tolerance=1.0) == [(0, 0), (0, 4)]


def test_plan_path_along_skeleton():
    """Test waypoints follow the skeleton and face their successor."""
    graph = VoronoiGraph.from_skeleton(_l_skeleton(), resolution=RES)

    plan = plan_path(graph, _cell_pose(2, 2), _cell_pose(7, 7, 1.0))

    assert plan.cells[0] == (2, 2)
    assert plan.cells[-1] == (7, 7)
    assert len(plan.cells) == 10
    assert plan.length == pytest.approx((8.0 + math.sqrt(2.0)) / RES)
    headings = [p.theta for p in plan.waypoints]
    assert headings == pytest.approx([0.0, math.pi / 4, math.pi / 2, 1.0])
    assert plan.points().shape == (4, 2)


def test_plan_path_snaps_to_nearest_node():
    """Test endpoints off the skeleton snap to the closest node."""
    graph = VoronoiGraph.from_skeleton(_l_skeleton(), resolution=RES)

    plan = plan_path(graph, _cell_pose(3, 2), _cell_pose(7, 8))

    assert plan.cells[0] == (2, 2)
    assert plan.cells[-1] == (7, 7)


def test_plan_path_endpoint_in_obstacle():
    """Test endpoints outside free space are rejected."""
    graph = VoronoiGraph.from_skeleton(_l_skeleton(), resolution=RES)
    free = np.ones((10, 10), dtype=bool)
    free[0, 0] = False

    with pytest.raises(InvalidEndpointError):
        plan_path(graph, _cell_pose(0, 0), _cell_pose(7, 7), free)
    with pytest.raises(InvalidEndpointError):
        plan_path(graph, _cell_pose(2, 2), Pose2D(5.0, 5.0), free)


def test_plan_path_disconnected_skeleton():
    """Test endpoints snapping to separate components raise NoPathError."""
    skeleton = np.zeros((10, 10), dtype=bool)
    skeleton[2, 1:4] = True
    skeleton[7, 5:9] = True
    graph = VoronoiGraph.from_skeleton(skeleton, resolution=RES)

    with pytest.raises(NoPathError):
        plan_path(graph, _cell_pose(2, 1), _cell_pose(7, 8))


def test_dijkstra_triangle_inequality():
    """Test skeleton distances obey the triangle inequality."""
    world = lab().world
    _, _, graph = build_graph(~world.free, world.resolution, world.origin)
    nodes = graph.nodes
    rng = np.random.default_rng(5)

    for _ in range(10):
        a, b, c = (nodes[i] for i in rng.choice(len(nodes), size=3, replace=False))
        ab, _ = dijkstra(graph, a, b)
        bc, _ = dijkstra(graph, b, c)
        ac, _ = dijkstra(graph, a, c)
        assert ac <= ab + bc + 1e-9


def test_plan_path_follows_corridor_centre_line():
    """Test a corridor path runs straight along the centre line without end detours."""
    built = corridor()
    world = built.world
    centre = -0.3 + 2.16 / 2.0
    _, _, graph = build_graph(~world.free, world.resolution, world.origin)

    plan = plan_path(graph, Pose2D(0.0, centre), Pose2D(9.0, centre), free=world.free)

    cell = 1.0 / world.resolution
    first, last = plan.waypoints[0], plan.waypoints[-1]
    assert all(abs(p.y - centre) <= cell for p in plan.waypoints)
    assert plan.length == pytest.approx(last.x - first.x, abs=cell)
    assert first.x < 1.0
    assert last.x > 8.0
