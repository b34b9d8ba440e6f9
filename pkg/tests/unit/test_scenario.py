"""Tests for scenario files."""
import math
from pathlib import Path

import pytest

from src.core.exceptions import ConfigurationError
from src.pipeline.scenario import (
    DEFAULT_RANGES_M,
    TrajectorySection,
    load_scenario,
    parse_floats,
    parse_pose,
    scenario_from_mapping,
)

SCENARIO = """\
[scenario]
world = synthetic:lab
seed = 4
output_dir = runs/lab

[placement]
ranges_m = 1,2.5   # meters
corner_rule = false

[detection]
range_sigma = 0.02
"""


def _write(tmp_path: Path, text: str = SCENARIO) -> Path:
    path = tmp_path / "lab.ini"
    path.write_text(text)
    return path


def test_parse_pose():
    """Test poses parse with an optional heading in degrees."""
    assert parse_pose("1, 2") == parse_pose("1,2,0")
    pose = parse_pose("1,2,90")
    assert (pose.x, pose.y) == (1.0, 2.0)
    assert pose.theta == pytest.approx(math.pi / 2)


@pytest.mark.parametrize("text", ["a,b", "1", "1,2,3,4"])
def test_parse_pose_invalid(text):
    """Test malformed poses raise ConfigurationError."""
    with pytest.raises(ConfigurationError):
        parse_pose(text)


def test_parse_floats():
    """Test number lists ignore empty items."""
    assert parse_floats("1, 2.5,") == (1.0, 2.5)
    with pytest.raises(ConfigurationError):
        parse_floats("1,x")


def test_load_scenario_defaults():
    """Test no file gives the default scenario."""
    scenario = load_scenario()

    assert scenario.scenario.world == "synthetic:corridor"
    assert scenario.placement.ranges_m == DEFAULT_RANGES_M
    assert scenario.seed(default=9) == 9
    assert scenario.source is None


def test_load_scenario_file(tmp_path):
    """Test INI values are validated into typed sections."""
    scenario = load_scenario(_write(tmp_path))

    assert scenario.scenario.synthetic_name == "lab"
    assert scenario.seed() == 4
    assert scenario.placement.ranges_m == (1.0, 2.5)
    assert scenario.placement.corner_rule is False
    assert scenario.detection.range_sigma == 0.02
    assert scenario.source == (tmp_path / "lab.ini").resolve()


def test_load_scenario_overrides(tmp_path):
    """Test overrides replace file values and None leaves them alone."""
    scenario = load_scenario(
        _write(tmp_path),
        {"scenario": {"seed": 8, "world": None}, "placement": {"ranges_m": "3"}},
    )

    assert scenario.seed() == 8
    assert scenario.scenario.world == "synthetic:lab"
    assert scenario.placement.ranges_m == (3.0,)


def test_load_scenario_missing_file(tmp_path):
    """Test a missing file raises ConfigurationError."""
    with pytest.raises(ConfigurationError):
        load_scenario(tmp_path / "nope.ini")


@pytest.mark.parametrize("text", [
    "[weather]\nrain = 1\n",
    "[scenario]\ncolour = red\n",
    "[placement]\nranges_m = 1,-2\n",
    "[laser]\nnan_rate = 2\n",
    "[scenario\nworld = x\n",
])
def test_load_scenario_invalid(tmp_path, text):
    """Test unknown sections, unknown keys and bad values are rejected."""
    with pytest.raises(ConfigurationError):
        load_scenario(_write(tmp_path, text))


def test_resolve_relative_to_file(tmp_path):
    """Test file references resolve next to the scenario."""
    scenario = load_scenario(_write(tmp_path))

    assert scenario.resolve("markers.csv") == tmp_path.resolve() / "markers.csv"
    assert scenario.resolve(str(tmp_path / "x.pgm")) == tmp_path / "x.pgm"


def test_trajectory_section_headings():
    """Test waypoints face their successor and the last keeps a given heading."""
    poses = TrajectorySection(waypoints="0,0; 1,0; 1,1,180").poses()

    assert [p.theta for p in poses] == pytest.approx([0.0, math.pi / 2, math.pi])
    assert TrajectorySection().poses() is None


def test_params_are_json_ready():
    """Test parameter blocks hold plain values per section."""
    scenario = scenario_from_mapping({"placement": {"ranges_m": "2"}})

    params = scenario.params("placement")

    assert list(params) == ["placement"]
    assert params["placement"]["ranges_m"] == [2.0]
