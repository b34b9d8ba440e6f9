"""Tests for the pose estimator and the navigation loop."""
import math

import pytest

from src.core.exceptions import LocalizationLostError
from src.core.models import Detection, Marker, MarkerDatabase, Pose2D, TrackingState
from src.geometry.localization import simulate_observation
from src.navigation.navigator import LoopConfig, Navigator, PoseEstimator
from src.navigation.tracker import TrackerState
from src.sim.world import WorldModel
from src.sim.worlds import corridor

MARKER = Marker(id=0, pose=Pose2D(3.0, 0.0, math.pi))


def _estimator(horizon_s: float = 1.0) -> PoseEstimator:
    tracker = TrackerState(tracked_id=0)
    return PoseEstimator(MarkerDatabase([MARKER]), tracker, Pose2D(0.0, 0.0, 0.0), horizon_s)


def _seen(robot: Pose2D) -> Detection:
    obs, turret = simulate_observation(robot, MARKER)
    return Detection(0, 0, TrackingState.TRACKED_WITH_POSE, robot.distance_to(MARKER.pose), obs, turret)


def _lost() -> Detection:
    return Detection(0, 0, TrackingState.DETECTED_ONLY, 5.0)


def test_estimator_takes_marker_fix():
    """Test a pose-grade detection becomes the raw and smoothed estimate."""
    estimator = _estimator()
    robot = Pose2D(0.5, 0.2, 0.1)

    kind = estimator.update(0.0, [_seen(robot)])

    assert kind == "smoothed"
    assert estimator.raw.distance_to(robot) == pytest.approx(0.0, abs=1e-9)
    assert estimator.estimate.distance_to(robot) == pytest.approx(0.0, abs=1e-9)


def test_estimator_dead_reckons_between_fixes():
    """Test the estimate integrates the last command while no fix arrives."""
    estimator = _estimator()
    estimator.update(0.0, [_seen(Pose2D(0.0, 0.0, 0.0))])

    kind = estimator.update(0.5, [_lost()], previous_command=(0.4, 0.0), dt=0.5)

    assert kind == "dead_reckoned"
    assert estimator.raw is None
    assert estimator.estimate.x == pytest.approx(0.2)
    assert estimator.estimate.y == pytest.approx(0.0, abs=1e-12)


def test_estimator_loses_localization_after_horizon():
    """Test missing fixes beyond the horizon raise."""
    estimator = _estimator(horizon_s=1.0)
    estimator.update(0.0, [_seen(Pose2D(0.0, 0.0, 0.0))])
    estimator.update(1.0, [_lost()], dt=1.0)

    with pytest.raises(LocalizationLostError):
        estimator.update(1.1, [_lost()], dt=0.1)


def test_estimator_fix_resets_horizon():
    """Test a fresh fix restarts the dead-reckoning clock."""
    estimator = _estimator(horizon_s=1.0)
    estimator.update(0.0, [_seen(Pose2D(0.0, 0.0, 0.0))])
    estimator.update(0.9, [_seen(Pose2D(0.1, 0.0, 0.0))])

    assert estimator.update(1.8, [_lost()], dt=0.9) == "dead_reckoned"


def _sparse_corridor() -> tuple:
    """12 m corridor with markers only at its two ends, 9 m apart."""
    built = corridor(12.0)
    ends = [m for m in built.world.markers if m.pose.x in (0.0, 9.0)]
    world = WorldModel(
        built.world.obstacles, built.world.free, 20.0, built.world.origin, ends, "sparse_corridor"
    )
    return world, built.route


def test_navigator_aborts_beyond_marker_range():
    """Test the loop gives up once the robot drives out of every marker's range."""
    world, route = _sparse_corridor()
    navigator = Navigator(world, MarkerDatabase(world.markers), loop=LoopConfig(max_duration_s=60.0))

    with pytest.raises(LocalizationLostError):
        navigator.run(route[0], route)
