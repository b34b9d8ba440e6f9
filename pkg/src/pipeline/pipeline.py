"""Main pipeline orchestration."""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import ndimage

from src.core.exceptions import ConfigurationError, InvalidInputError
from src.core.interfaces import ArtifactRepository, RunHeader
from src.core.models import Marker, MarkerDatabase, Pose2D, TrajectorySample
from src.core.raster import cell_center, world_to_cell
from src.evaluation.metrics import extract_obstacle_points
from src.evaluation.report import EvalReport, evaluate_map, evaluate_trajectory
from src.mapping.grid import OccupancyGrid
from src.mapping.session import MappingResult, MappingSession
from src.navigation.navigator import NavigationResult, Navigator
from src.pipeline.scenario import Scenario
from src.placement.coverage import (
    CoverageReport,
    ReductionResult,
    associate_path_points,
    coverage_raytrace,
    place_markers,
)
from src.planning.planner import PathPlan, plan_path
from src.planning.voronoi import build_graph
from src.sim.detection import range_for_size
from src.sim.world import WorldModel
from src.sim.worlds import SyntheticWorld, synthetic_world

logger = logging.getLogger("markernav")


@dataclass
class PlacementRun:
    """Placements for every requested range."""

    results: Dict[float, ReductionResult] = field(default_factory=dict)

    def curve(self) -> List[Tuple[float, int]]:
        return [(r, len(res.cells)) for r, res in sorted(self.results.items())]


def grid_from_world(world: WorldModel) -> OccupancyGrid:
    """Ground-truth bitmap as an occupancy grid (0 free, 100 obstacle, -1 outside)."""
    return OccupancyGrid(world.occupancy_cells(), world.resolution, world.origin)


def free_space(grid: OccupancyGrid, occ_threshold: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Obstacle bitmap and traversable region of a grid.

    The region is the largest 4-connected component of known free cells.
    """
    obstacles = (grid.cells >= occ_threshold).astype(np.uint8)
    known_free = grid.known_free(occ_threshold)
    labels, count = ndimage.label(known_free)
    if count == 0:
        raise InvalidInputError("Map has no known free cell")
    sizes = np.bincount(labels.ravel())[1:]
    return obstacles, labels == int(np.argmax(sizes)) + 1


class Pipeline:
    """Orchestrates the map, place, plan, navigate and eval stages of a scenario."""

    def __init__(self, scenario: Scenario, repository: ArtifactRepository, default_seed: int = 0):
        """
        Initialize pipeline.

        Args:
            scenario: Validated scenario
            repository: Storage for every emitted artifact
            default_seed: Seed used when the scenario does not set one
        """
        self.scenario = scenario
        self.repository = repository
        self.seed = scenario.seed(default_seed)

    def header(self, *sections: str) -> RunHeader:
        return RunHeader(seed=self.seed, params=self.scenario.params("scenario", *sections))

    def load_world(self) -> SyntheticWorld:
        """Build the scenario's world, with its scripted route and loop."""
        section = self.scenario.scenario
        if section.is_synthetic:
            kwargs = {}
            if section.world_length_m is not None:
                kwargs["length_m"] = section.world_length_m
            if section.world_width_m is not None:
                kwargs["width_m"] = section.world_width_m
            try:
                built = synthetic_world(section.synthetic_name, **kwargs)
            except TypeError as e:
                raise ConfigurationError(f"World '{section.synthetic_name}' does not take {sorted(kwargs)}") from e
            if section.markers:
                markers = self.repository.load_markers(self.scenario.resolve(section.markers))
                world = built.world
                built = SyntheticWorld(
                    WorldModel(world.obstacles, world.free, world.resolution, world.origin, markers, world.name),
                    built.route,
                    built.loop,
                )
        else:
            markers = self.repository.load_markers(self.scenario.resolve(section.markers)) if section.markers else []
            world = self.repository.load_world(self.scenario.resolve(section.world), markers)
            built = SyntheticWorld(world, [], [])
        route = self.scenario.trajectory.poses()
        if route:
            built = SyntheticWorld(built.world, route, route)
        return built

    @property
    def environment(self) -> str:
        section = self.scenario.scenario
        return section.environment or (section.synthetic_name if section.is_synthetic else "world")

    def map(self) -> Tuple[MappingResult, EvalReport]:
        """
        Run a scripted mapping session and evaluate the map against ground truth.

        Writes ``map.pgm``/``map.txt``, ``counts.csv``, ``trajectory.csv``,
        ``markers_estimated.csv``, ``world.pgm`` and ``eval.csv``/``eval.txt``.
        """
        built = self.load_world()
        if not built.route:
            raise ConfigurationError("Mapping needs [trajectory] waypoints for a world without a built-in route")
        s = self.scenario
        session = MappingSession(
            built.world,
            laser=s.laser,
            detection=s.detection,
            sensor_model=s.sensor_model,
            tracker=s.tracker,
            pursuit=s.pursuit,
            limits=s.robot,
            gains=s.turret,
            loop=s.loop,
            config=s.mapping,
            seed=self.seed,
        )
        result = session.run(built.route)

        header = self.header("laser", "detection", "sensor_model", "tracker", "pursuit", "loop", "mapping")
        repo = self.repository
        repo.save_grid("map", result.grid, header)
        rows, cols = np.nonzero(result.counts.counts)
        repo.save_table(
            "counts",
            ["row", "col", "count"],
            zip(rows.tolist(), cols.tolist(), result.counts.counts[rows, cols].tolist()),
            header,
        )
        repo.save_trajectory("trajectory", result.trajectory.samples, header)
        repo.save_markers("markers_estimated", result.database.markers(), header)
        repo.save_world("world", built.world, header)

        report = EvalReport(resolution=built.world.resolution)
        mapped = extract_obstacle_points(result.grid, s.placement.occ_threshold)
        truth = extract_obstacle_points(built.world.obstacles, origin=built.world.origin)
        evaluate_map(mapped, truth, report, self.environment)
        evaluate_trajectory(
            result.trajectory.of_kind("smoothed", "dead_reckoned"),
            result.trajectory.of_kind("truth"),
            report,
            self.environment,
        )
        self._save_report("eval", report, header)
        return result, report

    def _map_or_world(self, grid: Optional[OccupancyGrid]) -> Tuple[OccupancyGrid, np.ndarray, np.ndarray]:
        threshold = self.scenario.placement.occ_threshold
        if grid is None:
            world = self.load_world().world
            return grid_from_world(world), world.obstacles.astype(np.uint8), world.free
        obstacles, region = free_space(grid, threshold)
        return grid, obstacles, region

    def place(self, grid: Optional[OccupancyGrid] = None) -> PlacementRun:
        """
        Place markers for every configured range.

        Uses the given map, or the scenario world's ground truth. Writes the
        count-vs-range curve, plus markers and a coverage report for the
        smallest range (or the one implied by ``marker_size_cm``).
        """
        placement = self.scenario.placement
        grid, obstacles, region = self._map_or_world(grid)
        ranges = placement.ranges_m
        size_cm = placement.marker_size_cm if placement.marker_size_cm is not None else 20.0
        if placement.marker_size_cm is not None:
            ranges = (range_for_size(placement.marker_size_cm).tracking_m,)

        run = PlacementRun()
        for range_m in sorted(ranges):
            r_cells = range_m * grid.resolution
            run.results[range_m] = place_markers(obstacles, region, r_cells, placement.corner_rule)
            logger.info(f"Range {range_m:g} m: {len(run.results[range_m].cells)} markers")

        header = self.header("placement")
        self.repository.save_table("placement_curve", ["range_m", "marker_count"], run.curve(), header)
        chosen = min(run.results)
        result = run.results[chosen]
        markers = [
            Marker(
                id=i,
                pose=Pose2D(*cell_center(row, col, grid.resolution, grid.origin), math.pi),
                faces=placement.faces,
                size=size_cm / 100.0,
            )
            for i, (row, col) in enumerate(result.cells)
        ]
        self.repository.save_markers("markers", markers, header)
        coverage = CoverageReport.from_mask(result.coverage, chosen * grid.resolution)
        self.repository.save_text("coverage", coverage.to_text(), header)
        return run

    def plan(
        self,
        grid: Optional[OccupancyGrid] = None,
        start: Optional[Pose2D] = None,
        goal: Optional[Pose2D] = None,
    ) -> PathPlan:
        """
        Plan a path along the skeleton of the map (or ground-truth world).

        Writes ``skeleton.csv``, ``path.csv`` and ``path_overlay.pgm``.
        """
        nav = self.scenario.navigate
        start = start or nav.start_pose()
        goal = goal or nav.goal_pose()
        if start is None or goal is None:
            raise ConfigurationError("Planning needs [navigate] start and goal poses")
        grid, obstacles, region = self._map_or_world(grid)
        _, skeleton, graph = build_graph(obstacles, grid.resolution, grid.origin, region)
        plan = plan_path(graph, start, goal, free=region, simplify_tolerance=nav.simplify_tolerance)

        header = self.header("navigate")
        rows, cols = np.nonzero(skeleton)
        self.repository.save_cells("skeleton", zip(rows.tolist(), cols.tolist()), header)
        self.repository.save_cells("path", plan.cells, header)
        self.repository.save_path_overlay("path_overlay", grid, plan.cells, header)
        logger.info(f"Planned {plan.length:.2f} m through {len(plan.waypoints)} waypoints")
        return plan

    def associate(
        self,
        plan: PathPlan,
        markers: List[Marker],
        grid: Optional[OccupancyGrid] = None,
    ) -> Dict[Tuple[int, int], int]:
        """Assign every path cell to its covering marker and save the table."""
        if not markers:
            raise InvalidInputError("Path association needs at least one marker")
        grid, _, region = self._map_or_world(grid)
        r_cells = max(range_for_size(m.size * 100.0).tracking_m for m in markers) * grid.resolution
        cells = [world_to_cell(m.pose.x, m.pose.y, grid.resolution, grid.origin) for m in markers]
        masks = [coverage_raytrace(region, cell, r_cells) for cell in cells]
        assignment = associate_path_points(plan.cells, cells, masks)
        rows = [(r, c, markers[i].id) for (r, c), i in assignment.items()]
        self.repository.save_table("path_markers", ["row", "col", "marker_id"], rows, self.header("navigate"))
        return assignment

    def navigate(self, markers: Optional[List[Marker]] = None, plan: Optional[PathPlan] = None) -> NavigationResult:
        """
        Navigate autonomously in the scenario world.

        The route is the planned path when [navigate] start and goal are set,
        otherwise the world's built-in loop. Writes ``trajectory.csv`` and
        ``navigation.csv``/``navigation.txt``.
        """
        built = self.load_world()
        database = MarkerDatabase(markers if markers is not None else built.world.markers)
        nav = self.scenario.navigate
        if plan is None and nav.start and nav.goal:
            plan = self.plan(grid_from_world(built.world))
        if plan is not None:
            start, waypoints = nav.start_pose() or plan.waypoints[0], plan.waypoints
        elif built.loop:
            start, waypoints = built.loop[0], built.loop[1:]
        else:
            raise ConfigurationError("Navigation needs [navigate] start and goal, or a world with a loop")

        s = self.scenario
        navigator = Navigator(
            built.world,
            database,
            detection=s.detection,
            tracker=s.tracker,
            pursuit=s.pursuit,
            limits=s.robot,
            gains=s.turret,
            loop=s.loop,
            seed=self.seed,
        )
        result = navigator.run(start, waypoints)

        header = self.header("detection", "tracker", "pursuit", "loop", "navigate")
        self.repository.save_trajectory("trajectory", result.trajectory.samples, header)
        report = EvalReport(resolution=built.world.resolution)
        report.add("max_cross_track_m", result.max_cross_track, self.environment)
        report.add("mean_cross_track_m", float(np.mean(result.cross_track)) if result.cross_track else 0.0, self.environment)
        report.add("duration_s", result.duration_s, self.environment)
        evaluate_trajectory(
            result.trajectory.of_kind("smoothed", "dead_reckoned"),
            result.trajectory.of_kind("truth"),
            report,
            self.environment,
        )
        self._save_report("navigation", report, header)
        return result

    def evaluate(
        self,
        mapped: OccupancyGrid,
        truth: OccupancyGrid,
        symmetric: bool = False,
        trajectory: Optional[List[TrajectorySample]] = None,
    ) -> EvalReport:
        """
        Compare a map with a reference map; writes ``eval.csv``/``eval.txt``.

        A trajectory log holding estimated and ``truth`` samples adds ATE rows.
        """
        threshold = self.scenario.placement.occ_threshold
        report = EvalReport(resolution=truth.resolution)
        evaluate_map(
            extract_obstacle_points(mapped, threshold),
            extract_obstacle_points(truth, threshold),
            report,
            self.environment,
            symmetric,
        )
        if trajectory:
            estimated = [s for s in trajectory if s.kind in ("smoothed", "dead_reckoned")]
            truth_track = [s for s in trajectory if s.kind == "truth"]
            evaluate_trajectory(estimated, truth_track, report, self.environment)
        self._save_report("eval", report, self.header("placement"))
        return report

    def _save_report(self, name: str, report: EvalReport, header: RunHeader) -> None:
        self.repository.save_table(
            name,
            ["metric", "environment", "method", "value"],
            [(r.metric, r.environment, r.method, f"{r.value:.6f}") for r in report.rows],
            header,
        )
        self.repository.save_text(name, report.to_text(), header)
