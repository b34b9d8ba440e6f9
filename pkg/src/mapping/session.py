"""Scripted mapping run: marker chaining, turret scoops and scan fusion."""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field

from src.core.exceptions import InvalidInputError, NoFixError
from src.core.models import (
    Detection,
    Marker,
    MarkerDatabase,
    Pose2D,
    RobotState,
    TrackingState,
    Trajectory,
    TrajectorySample,
)
from src.geometry.localization import centering_offset, chain_marker_transform, robot_pose_from_marker
from src.geometry.transforms import Transform2D, scanner_pose
from src.mapping.grid import (
    DEFAULT_SIZE,
    ObservationCounts,
    OccupancyGrid,
    SensorModel,
    fuse_global,
    raytrace_local,
)
from src.mapping.scan import RANGE_CEILING, preprocess_scan
from src.navigation.control import PathFollower, PurePursuitConfig
from src.navigation.navigator import LoopConfig, PoseEstimator
from src.navigation.tracker import TrackerConfig, TrackerState, pan_to_marker, switch_decision
from src.sim.detection import DetectionSpec, detections_by_id, simulate_marker_detection
from src.sim.robot import RobotLimits, robot_step
from src.sim.turret import PAN_SERVO_LIMITS, PAN_SERVO_OFFSET, PidGains, TurretServo, turret_step
from src.sim.world import LaserSpec, WorldModel, simulate_scan

logger = logging.getLogger("markernav")

# scan and scoop draws are offset from the per-frame detection seeds
_SCAN_SEED_OFFSET = 1_000_003
_SCOOP_SEED_OFFSET = 2_000_003


class MappingConfig(BaseModel):
    """Mapping-run parameters."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    grid_size: int = Field(default=DEFAULT_SIZE, ge=16)
    resolution: float = Field(default=20.0, gt=0.0)
    range_ceiling: float = Field(default=RANGE_CEILING, gt=0.0)
    scan_every: int = Field(default=3, ge=1)
    scoop_distance: float = Field(default=2.0, gt=0.0)
    scoop_spacing: float = Field(default=1.0, ge=0.0)
    scoop_step_deg: float = Field(default=10.0, gt=0.0)
    settle_m: float = Field(default=0.05, gt=0.0)  # fix offset allowed from turret lag, one default cell
    anchor_id: Optional[int] = None


@dataclass
class MappingResult:
    """Output of a mapping run."""

    grid: OccupancyGrid
    counts: ObservationCounts
    trajectory: Trajectory
    database: MarkerDatabase
    scans_fused: int = 0
    scoops: int = 0
    duration_s: float = 0.0


@dataclass
class _Scoop:
    position: Optional[Pose2D] = None
    count: int = 0


class MappingSession:
    """
    Drive a scripted route through a world and build its occupancy grid.

    The first marker is anchored at its surveyed pose; every other marker is
    registered by chaining from the tracked marker while the robot stands in
    a transition zone. The operator follows the route with ground-truth
    feedback, while all fused scans are placed with marker-derived poses.
    """

    def __init__(
        self,
        world: WorldModel,
        laser: LaserSpec = LaserSpec(),
        detection: DetectionSpec = DetectionSpec(),
        sensor_model: SensorModel = SensorModel(),
        tracker: TrackerConfig = TrackerConfig(),
        pursuit: PurePursuitConfig = PurePursuitConfig(),
        limits: RobotLimits = RobotLimits(),
        gains: PidGains = PidGains(),
        loop: LoopConfig = LoopConfig(),
        config: MappingConfig = MappingConfig(),
        seed: int = 0,
    ):
        if not world.markers:
            raise InvalidInputError("Mapping needs at least one installed marker")
        self.world = world
        self.laser = laser
        self.detection = detection
        self.sensor_model = sensor_model
        self.tracker_config = tracker
        self.pursuit = pursuit
        self.limits = limits
        self.gains = gains
        self.loop = loop
        self.config = config
        self.seed = seed

    def _anchor(self) -> Marker:
        if self.config.anchor_id is None:
            return min(self.world.markers, key=lambda m: m.id)
        marker = self.world.marker(self.config.anchor_id)
        if marker is None:
            raise InvalidInputError(f"Anchor marker {self.config.anchor_id} is not installed")
        return marker

    def run(self, route: Sequence[Pose2D]) -> MappingResult:
        """
        Follow the route, registering markers and fusing scans.

        Args:
            route: Scripted operator waypoints; the robot starts at the first

        Returns:
            Global grid, observation counts, trajectory log and the
            estimated marker database

        Raises:
            LocalizationLostError: If marker fixes stop for longer than the horizon
        """
        if not route:
            raise InvalidInputError("Mapping route is empty")
        dt = self.loop.dt
        size = self.config.grid_size
        grid = OccupancyGrid.empty(size, size, self.config.resolution)
        counts = ObservationCounts.like(grid)
        database = MarkerDatabase([self._anchor()])
        tracker = TrackerState(self.tracker_config)
        estimator = PoseEstimator(database, tracker, route[0], self.loop.dead_reckoning_s)
        servo = TurretServo(gains=self.gains)
        truth = RobotState(route[0])
        follower = PathFollower(list(route), self.pursuit)
        bearings = self.laser.bearings()

        switch_decision(tracker, route[0], database)
        servo.snap_pan(pan_to_marker(route[0], database[tracker.tracked_id]))
        result = MappingResult(grid, counts, Trajectory(), database)
        samples = result.trajectory.samples
        scoop = _Scoop()
        command = (0.0, 0.0)
        max_ticks = int(math.ceil(self.loop.max_duration_s / dt))

        logger.info(
            f"Mapping '{self.world.name}' along {len(route)} waypoints, anchor marker {tracker.tracked_id}"
        )
        for tick in range(max_ticks):
            t = tick * dt
            detections = simulate_marker_detection(
                self.world, truth.pose, servo.angles, self.detection, self.seed + tick
            )
            kind = estimator.update(t, detections, command, dt if tick else 0.0)
            raw = estimator.raw
            if raw is not None:
                samples.append(TrajectorySample(t, raw, "raw", tracker.tracked_id))

            if raw is not None and self._scoop_due(scoop, raw, database[tracker.tracked_id]):
                self._scoop(tick, truth.pose, raw, detections, database, servo, tracker.tracked_id)
                scoop.position = raw
                scoop.count += 1

            if (
                raw is not None
                and tick % self.config.scan_every == 0
                and self._settled(detections, tracker.tracked_id)
            ):
                ranges = simulate_scan(self.world, truth.pose, self.laser, self.seed + _SCAN_SEED_OFFSET + tick)
                clean = preprocess_scan(ranges, bearings, self.config.range_ceiling)
                local = raytrace_local(clean, self.config.resolution)
                fuse_global(grid, counts, local, scanner_pose(raw, self.laser.offset_y), self.sensor_model)
                result.scans_fused += 1

            estimate = estimator.estimate
            tracked_id = switch_decision(tracker, estimate, database, servo)
            command = follower.step(truth.pose)
            samples.append(TrajectorySample(t, estimate, kind, tracked_id, *command))
            samples.append(TrajectorySample(t, truth.pose, "truth", tracked_id, *command))
            if follower.done:
                result.duration_s = t
                break

            truth = robot_step(truth, command[0], command[1], dt, self.limits, self.world)
            command = (truth.v, truth.w)
            servo.command(pan_to_marker(estimate, database[tracked_id]))
            turret_step(servo, dt)
        else:
            result.duration_s = max_ticks * dt
            logger.warning(f"Mapping stopped after {self.loop.max_duration_s:.0f} s before the route end")

        result.scoops = scoop.count
        logger.info(
            f"Mapped with {result.scans_fused} scans, {result.scoops} scoops, "
            f"{len(database)}/{len(self.world.markers)} markers registered"
        )
        return result

    def _scoop_due(self, scoop: _Scoop, fix: Pose2D, tracked: Marker) -> bool:
        if scoop.position is None:
            return True
        return (
            fix.distance_to(tracked.pose) >= self.config.scoop_distance
            and fix.distance_to(scoop.position) >= self.config.scoop_spacing
        )

    def _settled(self, detections: List[Detection], tracked_id: int) -> bool:
        """Whether the turret lag shifts the fix by at most the settle distance."""
        tracked = detections_by_id(detections)[tracked_id]
        if tracked.observation is None:
            return False
        offset = abs(centering_offset(tracked.observation, tracked.turret))
        return tracked.distance * math.sin(offset) <= self.config.settle_m

    def _centered(
        self, robot_pose: Pose2D, servo: TurretServo, detection: Detection, seed: int
    ) -> Optional[Detection]:
        """Re-aim the turret on a tracked marker and look again."""
        servo.snap_pan(servo.angles.pan + centering_offset(detection.observation, detection.turret))
        frame = simulate_marker_detection(self.world, robot_pose, servo.angles, self.detection, seed)
        again = detections_by_id(frame)[detection.marker_id]
        return again if again.state is TrackingState.TRACKED_WITH_POSE else None

    def _scoop(
        self,
        tick: int,
        robot_pose: Pose2D,
        fix: Pose2D,
        detections: List[Detection],
        database: MarkerDatabase,
        servo: TurretServo,
        tracked_id: int,
    ) -> None:
        """Sweep the turret once round and register every new pose-grade marker."""
        lo, hi = PAN_SERVO_LIMITS
        step = self.config.scoop_step_deg
        angles = [lo + k * step for k in range(int((hi - lo) // step) + 1)]
        base_seed = self.seed + _SCOOP_SEED_OFFSET + tick * 2 * (len(angles) + 1)

        anchor = database[tracked_id]
        current = detections_by_id(detections)[tracked_id]
        current = self._centered(robot_pose, servo, current, base_seed) or current
        local_frame = {tracked_id: Marker(tracked_id, Pose2D(0.0, 0.0, 0.0), anchor.faces, anchor.size)}
        pose_wrt_prev = robot_pose_from_marker(
            current.observation, current.turret, tracked_id, local_frame, face=current.face
        )
        anchor_frame = Transform2D.from_pose(anchor.pose)

        for k, servo_deg in enumerate(angles):
            servo.snap_pan(math.radians(servo_deg - PAN_SERVO_OFFSET))
            frame = simulate_marker_detection(
                self.world,
                robot_pose,
                servo.angles,
                self.detection,
                base_seed + 2 * k + 1,
            )
            for detection in frame:
                if detection.marker_id in database:
                    continue
                if detection.state is not TrackingState.TRACKED_WITH_POSE:
                    continue
                sweep_pan = servo.angles.pan
                centered = self._centered(robot_pose, servo, detection, base_seed + 2 * k + 2)
                servo.snap_pan(sweep_pan)
                if centered is None:
                    continue
                try:
                    face_in_prev = chain_marker_transform(pose_wrt_prev, centered.observation, centered.turret)
                except NoFixError:
                    continue
                installed = self.world.marker(centered.marker_id)
                face_pose = (anchor_frame @ face_in_prev).to_pose()
                face_offset = centered.face * 2.0 * math.pi / installed.faces
                database.add(Marker(
                    id=centered.marker_id,
                    pose=Pose2D(face_pose.x, face_pose.y, face_pose.theta - face_offset),
                    faces=installed.faces,
                    size=installed.size,
                ))
                logger.info(
                    f"Registered marker {centered.marker_id} at ({face_pose.x:.2f}, {face_pose.y:.2f}) "
                    f"from marker {tracked_id}"
                )
        servo.snap_pan(pan_to_marker(fix, anchor))
