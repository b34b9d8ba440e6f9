"""Integration tests for pipeline."""
import math

import numpy as np
import pytest

from src.core.exceptions import ConfigurationError, InvalidInputError
from src.core.interfaces import RunHeader
from src.core.models import Marker, Pose2D
from src.pipeline.pipeline import Pipeline, free_space, grid_from_world
from src.pipeline.scenario import scenario_from_mapping
from src.providers.storage.file_repo import FileRepository
from src.sim.worlds import room


def _pipeline(tmp_path, **sections):
    data = {"scenario": {"world": "synthetic:room", "seed": 5}}
    data.update(sections)
    return Pipeline(scenario_from_mapping(data), FileRepository(tmp_path))


def test_pipeline_place_on_ground_truth(tmp_path):
    """Test placement covers the room and saves markers for the smallest range."""
    pipeline = _pipeline(tmp_path, placement={"ranges_m": "2,3"})

    run = pipeline.place()

    assert sorted(run.results) == [2.0, 3.0]
    assert run.results[2.0].coverage.fraction() == 1.0
    assert run.curve()[0][1] >= run.curve()[1][1]
    markers = pipeline.repository.load_markers("markers")
    assert len(markers) == len(run.results[2.0].cells)
    assert [m.id for m in markers] == list(range(len(markers)))
    assert all(m.faces == 4 and m.size == pytest.approx(0.20) for m in markers)
    assert "total_free_cells" in (tmp_path / "coverage.txt").read_text()


def test_pipeline_place_with_marker_size(tmp_path):
    """Test a marker size replaces the range list with its tracking distance."""
    pipeline = _pipeline(tmp_path, placement={"marker_size_cm": 20})

    run = pipeline.place()

    assert list(run.results) == [pytest.approx(4.25)]
    assert pipeline.repository.load_markers("markers")[0].size == pytest.approx(0.20)


def test_pipeline_plan_and_associate(tmp_path):
    """Test a planned room path is assigned to covering markers."""
    pipeline = _pipeline(tmp_path, placement={"ranges_m": "2"})
    pipeline.place()
    markers = pipeline.repository.load_markers("markers")

    plan = pipeline.plan(start=Pose2D(0.6, 0.3), goal=Pose2D(2.5, 2.5))
    assignment = pipeline.associate(plan, markers)

    assert plan.length > 0
    assert set(assignment) == set(plan.cells)
    assert set(assignment.values()) <= set(range(len(markers)))
    assert (tmp_path / "skeleton.csv").exists()
    assert (tmp_path / "path.csv").exists()
    assert (tmp_path / "path_overlay.pgm").exists()
    assert (tmp_path / "path_markers.csv").exists()


def test_pipeline_plan_needs_endpoints(tmp_path):
    """Test planning without start and goal is a configuration error."""
    with pytest.raises(ConfigurationError):
        _pipeline(tmp_path).plan()


def test_pipeline_associate_needs_markers(tmp_path):
    """Test association with no markers raises InvalidInputError."""
    pipeline = _pipeline(tmp_path)
    plan = pipeline.plan(start=Pose2D(0.6, 0.3), goal=Pose2D(2.5, 2.5))

    with pytest.raises(InvalidInputError):
        pipeline.associate(plan, [])


def test_pipeline_navigate_room_loop(tmp_path):
    """Test the room loop is driven to the end and logged."""
    pipeline = _pipeline(tmp_path)

    result = pipeline.navigate()

    assert result.reached
    final = result.final_pose()
    assert math.hypot(final.x - 0.6, final.y - 0.3) < 0.1
    kinds = {s.kind for s in pipeline.repository.load_trajectory("trajectory")}
    assert {"truth", "raw", "smoothed"} <= kinds
    assert "max_cross_track_m" in (tmp_path / "navigation.csv").read_text()


def test_pipeline_navigate_planned_path(tmp_path):
    """Test start and goal poses make navigation follow a planned path."""
    pipeline = _pipeline(tmp_path, navigate={"start": "0.6,0.3", "goal": "2.5,2.5"})

    result = pipeline.navigate()

    assert result.reached
    final = result.final_pose()
    assert math.hypot(final.x - 2.5, final.y - 2.5) < 0.1
    assert (tmp_path / "path.csv").exists()


def test_pipeline_map_and_evaluate(tmp_path):
    """Test a short mapping run saves the map and evaluates it."""
    pipeline = _pipeline(
        tmp_path,
        trajectory={"waypoints": "0.6,0.3; 2.5,0.3"},
        mapping={"grid_size": 300},
    )

    result, report = pipeline.map()

    saved = pipeline.repository.load_grid("map")
    np.testing.assert_array_equal(saved.cells, result.grid.cells)
    assert saved.origin == result.grid.origin
    assert report.value("adnn_cells") < 2.0
    assert report.value("ate_m") is not None
    assert {m.id for m in pipeline.repository.load_markers("markers_estimated")} >= {0}
    assert (tmp_path / "world.pgm").exists()
    assert (tmp_path / "counts.csv").exists()

    truth = grid_from_world(pipeline.load_world().world)
    evaluated = pipeline.evaluate(result.grid, truth, symmetric=True, trajectory=result.trajectory.samples)
    assert evaluated.value("adnn_cells") >= 0.0
    assert evaluated.value("ate_m") is not None


def test_pipeline_map_needs_route(tmp_path):
    """Test mapping a file world without waypoints is a configuration error."""
    repo = FileRepository(tmp_path)
    repo.save_world("plan", room().world, RunHeader())
    scenario = scenario_from_mapping({"scenario": {"world": str(tmp_path / "plan.pgm")}})

    with pytest.raises(ConfigurationError):
        Pipeline(scenario, repo).map()


def test_pipeline_load_world_with_marker_file(tmp_path):
    """Test a marker file replaces the synthetic world's markers."""
    repo = FileRepository(tmp_path)
    repo.save_markers("mine", [Marker(id=9, pose=Pose2D(1.0, 1.0, math.pi))], RunHeader())
    scenario = scenario_from_mapping({
        "scenario": {"world": "synthetic:room", "markers": str(tmp_path / "mine.csv")},
    })

    built = Pipeline(scenario, repo).load_world()

    assert [m.id for m in built.world.markers] == [9]
    assert built.loop


def test_pipeline_unknown_world_parameter(tmp_path):
    """Test a world parameter the factory does not take is rejected."""
    scenario = scenario_from_mapping({"scenario": {"world": "synthetic:lab", "world_length_m": 5}})

    with pytest.raises(ConfigurationError):
        Pipeline(scenario, FileRepository(tmp_path)).load_world()


def test_free_space_keeps_largest_component():
    """Test the traversable region is the largest known-free component."""
    grid = grid_from_world(room().world)
    grid.cells[1, 1] = 0  # isolated free pocket outside the walls

    obstacles, region = free_space(grid, 50)

    assert region.sum() == room().world.free.sum()
    assert not region[1, 1]
    assert obstacles.sum() == room().world.obstacles.sum()
