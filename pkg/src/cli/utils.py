"""CLI utility functions."""
import json
from pathlib import Path
from typing import Any, Dict, Optional

import click

from src.core.exceptions import ConfigurationError, MarkerNavError
from src.pipeline.pipeline import Pipeline
from src.pipeline.scenario import load_scenario, parse_floats, parse_pose
from src.providers.storage.file_repo import FileRepository
from src.utils.config import Config


def validate_pose(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Optional[str]:
    """
    Click callback checking an ``x,y[,theta_deg]`` option.

    The text is passed on unchanged so it can be recorded in the scenario.
    """
    if value is None:
        return None
    try:
        parse_pose(value)
    except ConfigurationError as e:
        raise click.BadParameter(str(e)) from None
    return value


def validate_ranges(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Optional[str]:
    """Click callback checking a comma-separated list of ranges in meters."""
    if value is None:
        return None
    try:
        ranges = parse_floats(value)
    except ConfigurationError as e:
        raise click.BadParameter(str(e)) from None
    if not ranges or any(r <= 0 for r in ranges):
        raise click.BadParameter(f"Ranges must be positive, got '{value}'")
    return value


def error_payload(error: Exception) -> str:
    """One-line JSON error object for stderr."""
    exit_code = error.exit_code if isinstance(error, MarkerNavError) else 1
    return json.dumps(
        {"error": type(error).__name__, "message": str(error), "exit_code": exit_code},
        sort_keys=True,
    )


def build_pipeline(
    config: Config,
    scenario_path: Optional[Path],
    overrides: Dict[str, Dict[str, Any]],
    output_dir: Optional[Path] = None,
) -> Pipeline:
    """
    Load a scenario, apply command-line overrides and open its output directory.

    Args:
        config: Process configuration (default seed, runs directory)
        scenario_path: Scenario INI file, or None for defaults
        overrides: Section values given on the command line
        output_dir: Output directory overriding the scenario's

    Returns:
        Pipeline writing into the resolved output directory
    """
    scenario = load_scenario(scenario_path, overrides)
    if output_dir is not None:
        target = Path(output_dir)
    else:
        target = config.resolve_output_dir(Path(scenario.scenario.output_dir))
    repository = FileRepository(target)
    return Pipeline(scenario, repository, default_seed=config.default_seed)
