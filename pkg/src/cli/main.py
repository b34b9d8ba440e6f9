"""Main CLI application."""
import logging
import sys
import time
from pathlib import Path

import click
from rich.console import Console
from rich.table import Table

from src.cli.utils import build_pipeline, error_payload, validate_pose, validate_ranges
from src.core.exceptions import MarkerNavError
from src.pipeline.scenario import load_scenario
from src.sim.detection import MARKER_RANGE_TABLE, range_for_size
from src.utils.config import Config
from src.utils.logging import parse_level, setup_logging

SCENARIO_FILE = click.Path(dir_okay=False, path_type=Path)
EXISTING_FILE = click.Path(exists=True, dir_okay=False, path_type=Path)
OUTPUT_DIR = click.Path(file_okay=False, path_type=Path)


def _fail(error: BaseException, logger: logging.Logger, action: str) -> None:
    """Report an error as one JSON line on stderr and exit with its code."""
    if isinstance(error, KeyboardInterrupt):
        click.echo("\nInterrupted by user", err=True)
        sys.exit(1)
    if isinstance(error, MarkerNavError):
        logger.debug(f"{action} failed: {error}")
        click.echo(error_payload(error), err=True)
        sys.exit(error.exit_code)
    logger.exception(f"{action} failed")
    click.echo(error_payload(error), err=True)
    sys.exit(1)


def _start(config: Config, stage: str) -> logging.Logger:
    config.ensure_directories_exist()
    try:
        return setup_logging(config, stage)
    except MarkerNavError as e:
        click.echo(error_payload(e), err=True)
        sys.exit(e.exit_code)


@click.group()
def cli():
    """MarkerNav - Map, place markers in and navigate indoor environments."""
    pass


@cli.command("map")
@click.option("--scenario", "scenario_path", type=SCENARIO_FILE, help="Scenario INI file")
@click.option("--world", help="PGM world file or synthetic:<name>")
@click.option("--seed", type=int, help="Random seed (overrides the scenario)")
@click.option("--output-dir", type=OUTPUT_DIR, help="Directory for all artifacts")
def map_command(scenario_path, world, seed, output_dir):
    """Build an occupancy grid by driving a scripted mapping run.

    Examples:
        markernav map --world synthetic:corridor --output-dir runs/corridor
        markernav map --scenario lab.ini --seed 3
    """
    config = Config()
    logger = _start(config, "map")
    started = time.perf_counter()

    try:
        pipeline = build_pipeline(config, scenario_path, {"scenario": {"world": world, "seed": seed}}, output_dir)
        click.echo(f"Mapping {pipeline.scenario.scenario.world}...")
        result, report = pipeline.map()
        pipeline.repository.save_runtime(time.perf_counter() - started)

        click.echo(f"✓ Map saved to {pipeline.repository.output_dir}")
        click.echo(f"  Scans fused: {result.scans_fused}")
        click.echo(f"  Markers registered: {len(result.database)}")
        click.echo(f"  ADNN: {report.value('adnn_cells'):.3f} cells")

    except (KeyboardInterrupt, Exception) as e:
        _fail(e, logger, "Mapping")


@cli.command()
@click.option("--scenario", "scenario_path", type=SCENARIO_FILE, help="Scenario INI file")
@click.option("--map", "map_file", type=EXISTING_FILE, help="Occupancy grid PGM (default: ground-truth world)")
@click.option("--world", help="PGM world file or synthetic:<name> used when no map is given")
@click.option("--ranges", callback=validate_ranges, help="Comma-separated marker ranges in meters")
@click.option("--size-cm", type=float, help="Marker size; its tracking distance becomes the range")
@click.option("--corner-rule/--no-corner-rule", default=None, help="Add corner candidates for small rectangles")
@click.option("--seed", type=int, help="Random seed (overrides the scenario)")
@click.option("--output-dir", type=OUTPUT_DIR, help="Directory for all artifacts")
def place(scenario_path, map_file, world, ranges, size_cm, corner_rule, seed, output_dir):
    """Place the fewest markers covering all free space.

    Examples:
        markernav place --map map.pgm --ranges 1,2,3,4,5,6,7
        markernav place --scenario corridor.ini --size-cm 30
    """
    config = Config()
    logger = _start(config, "place")
    started = time.perf_counter()

    try:
        overrides = {
            "scenario": {"world": world, "seed": seed},
            "placement": {"ranges_m": ranges, "marker_size_cm": size_cm, "corner_rule": corner_rule},
        }
        pipeline = build_pipeline(config, scenario_path, overrides, output_dir)
        grid = pipeline.repository.load_grid(map_file.resolve()) if map_file else None
        run = pipeline.place(grid)
        pipeline.repository.save_runtime(time.perf_counter() - started)

        click.echo(f"✓ Placement saved to {pipeline.repository.output_dir}")
        for range_m, count in run.curve():
            click.echo(f"  {range_m:g} m: {count} markers")

    except (KeyboardInterrupt, Exception) as e:
        _fail(e, logger, "Placement")


@cli.command()
@click.option("--scenario", "scenario_path", type=SCENARIO_FILE, help="Scenario INI file")
@click.option("--map", "map_file", type=EXISTING_FILE, help="Occupancy grid PGM (default: ground-truth world)")
@click.option("--world", help="PGM world file or synthetic:<name> used when no map is given")
@click.option("--start", callback=validate_pose, help="Start pose x,y[,theta_deg]")
@click.option("--goal", callback=validate_pose, help="Goal pose x,y[,theta_deg]")
@click.option("--markers", "markers_file", type=EXISTING_FILE, help="Marker CSV to associate with the path")
@click.option("--seed", type=int, help="Random seed (overrides the scenario)")
@click.option("--output-dir", type=OUTPUT_DIR, help="Directory for all artifacts")
def plan(scenario_path, map_file, world, start, goal, markers_file, seed, output_dir):
    """Plan a path along the map skeleton.

    Examples:
        markernav plan --map map.pgm --start 0.5,0 --goal 9.5,0
        markernav plan --scenario lab.ini --markers markers.csv
    """
    config = Config()
    logger = _start(config, "plan")
    started = time.perf_counter()

    try:
        overrides = {"scenario": {"world": world, "seed": seed}, "navigate": {"start": start, "goal": goal}}
        pipeline = build_pipeline(config, scenario_path, overrides, output_dir)
        grid = pipeline.repository.load_grid(map_file.resolve()) if map_file else None
        path = pipeline.plan(grid)
        if markers_file:
            markers = pipeline.repository.load_markers(markers_file.resolve())
            assignment = pipeline.associate(path, markers, grid)
            click.echo(f"  Path cells associated: {len(assignment)}")
        pipeline.repository.save_runtime(time.perf_counter() - started)

        click.echo(f"✓ Path saved to {pipeline.repository.output_dir}")
        click.echo(f"  Length: {path.length:.2f} m")
        click.echo(f"  Waypoints: {len(path.waypoints)}")

    except (KeyboardInterrupt, Exception) as e:
        _fail(e, logger, "Planning")


@cli.command()
@click.option("--scenario", "scenario_path", type=SCENARIO_FILE, help="Scenario INI file")
@click.option("--world", help="PGM world file or synthetic:<name>")
@click.option("--markers", "markers_file", type=EXISTING_FILE, help="Marker CSV (default: the world's markers)")
@click.option("--start", callback=validate_pose, help="Start pose x,y[,theta_deg]")
@click.option("--goal", callback=validate_pose, help="Goal pose x,y[,theta_deg]")
@click.option("--seed", type=int, help="Random seed (overrides the scenario)")
@click.option("--output-dir", type=OUTPUT_DIR, help="Directory for all artifacts")
def navigate(scenario_path, world, markers_file, start, goal, seed, output_dir):
    """Drive autonomously using marker localization.

    Without start and goal the world's built-in loop is driven.

    Examples:
        markernav navigate --world synthetic:lab
        markernav navigate --scenario corridor.ini --start 0.5,0 --goal 9.5,0
    """
    config = Config()
    logger = _start(config, "navigate")
    started = time.perf_counter()

    try:
        overrides = {
            "scenario": {"world": world, "seed": seed},
            "navigate": {"start": start, "goal": goal},
        }
        pipeline = build_pipeline(config, scenario_path, overrides, output_dir)
        markers = pipeline.repository.load_markers(markers_file.resolve()) if markers_file else None
        result = pipeline.navigate(markers)
        pipeline.repository.save_runtime(time.perf_counter() - started)

        status = "✓ Reached goal" if result.reached else "✗ Goal not reached"
        click.echo(f"{status} after {result.duration_s:.1f} s")
        click.echo(f"  Max cross-track error: {result.max_cross_track:.3f} m")
        click.echo(f"  Marker switches: {result.switches}")
        if not result.reached:
            sys.exit(1)

    except (KeyboardInterrupt, Exception) as e:
        _fail(e, logger, "Navigation")


@cli.command("eval")
@click.argument("map_file", type=EXISTING_FILE)
@click.argument("reference_file", type=EXISTING_FILE)
@click.option("--trajectory", "trajectory_file", type=EXISTING_FILE, help="Trajectory CSV with estimated and truth rows")
@click.option("--symmetric", is_flag=True, help="Average nearest-neighbour distances in both directions")
@click.option("--scenario", "scenario_path", type=SCENARIO_FILE, help="Scenario INI file")
@click.option("--output-dir", type=OUTPUT_DIR, help="Directory for all artifacts")
def evaluate(map_file, reference_file, trajectory_file, symmetric, scenario_path, output_dir):
    """Compare a map against a reference map.

    Examples:
        markernav eval runs/lab/map.pgm runs/lab/world.pgm
        markernav eval map.pgm world.pgm --trajectory trajectory.csv --symmetric
    """
    config = Config()
    logger = _start(config, "eval")
    started = time.perf_counter()

    try:
        pipeline = build_pipeline(config, scenario_path, {}, output_dir)
        repo = pipeline.repository
        mapped = repo.load_grid(map_file.resolve())
        reference = repo.load_grid(reference_file.resolve())
        trajectory = repo.load_trajectory(trajectory_file.resolve()) if trajectory_file else None
        report = pipeline.evaluate(mapped, reference, symmetric, trajectory)
        repo.save_runtime(time.perf_counter() - started)

        Console().print(report.to_table())

    except (KeyboardInterrupt, Exception) as e:
        _fail(e, logger, "Evaluation")


@cli.command("range-table")
@click.option("--size-cm", type=float, multiple=True, help="Extra marker size to interpolate")
def range_table(size_cm):
    """Print tracking and cutoff distances per marker size."""
    table = Table(title="Marker ranges")
    table.add_column("Size (cm)", justify="right", style="cyan")
    table.add_column("Tracking (m)", justify="right", style="green")
    table.add_column("Cutoff (m)", justify="right")

    try:
        entries = list(MARKER_RANGE_TABLE) + [range_for_size(s) for s in size_cm]
    except MarkerNavError as e:
        click.echo(error_payload(e), err=True)
        sys.exit(e.exit_code)
    for entry in sorted(entries, key=lambda e: e.size_cm):
        table.add_row(f"{entry.size_cm:g}", f"{entry.tracking_m:.2f}", f"{entry.cutoff_m:.2f}")
    Console().print(table)


@cli.command()
@click.option("--scenario", "scenario_path", type=SCENARIO_FILE, help="Scenario INI file to check")
def validate(scenario_path):
    """Validate MarkerNav setup."""
    config = Config()
    errors = []

    # Check data directory
    try:
        config.ensure_directories_exist()
        click.echo("✓ Data directories created")
    except Exception as e:
        errors.append(f"✗ Cannot create data directories: {e}")

    try:
        parse_level(config.log_level)
    except MarkerNavError as e:
        errors.append(f"✗ {e}")

    # Check scenario
    if scenario_path:
        try:
            scenario = load_scenario(scenario_path)
            click.echo(f"✓ Scenario valid: {scenario.scenario.world}")
        except MarkerNavError as e:
            errors.append(f"✗ Invalid scenario: {e}")

    # Check dependencies
    try:
        import numpy  # noqa: F401
        import scipy  # noqa: F401
        import skimage  # noqa: F401
        import PIL  # noqa: F401
        click.echo("✓ Dependencies installed")
    except ImportError as e:
        errors.append(f"✗ Missing dependency: {e}")

    # Summary
    if errors:
        click.echo("\n" + "\n".join(errors))
        click.echo("\n✗ Setup validation failed")
        click.echo("See QUICKSTART.md for setup instructions")
        sys.exit(1)
    else:
        click.echo("\n✓ Setup validated successfully!")


if __name__ == '__main__':
    cli()
