"""Tests for logging setup."""
import logging
import re
from datetime import datetime
from unittest.mock import Mock

import pytest
from rich.logging import RichHandler

from src.core.exceptions import ConfigurationError
from src.utils.config import Config
from src.utils.logging import log_file_name, parse_level, setup_logging


def _config(tmp_path, level="INFO"):
    config = Mock(spec=Config)
    config.log_level = level
    config.log_dir = tmp_path
    return config


def test_setup_logging_console_level(tmp_path):
    """Test the console handler follows LOG_LEVEL while the file keeps DEBUG."""
    logger = setup_logging(_config(tmp_path, "WARNING"))

    assert logger.name == "markernav"
    consoles = [h for h in logger.handlers if isinstance(h, RichHandler)]
    files = [h for h in logger.handlers if isinstance(h, logging.FileHandler)]
    assert len(consoles) == 1 and consoles[0].level == logging.WARNING
    assert len(files) == 1 and files[0].level == logging.DEBUG


def test_setup_logging_writes_debug_to_file(tmp_path):
    """Test per-iteration DEBUG records reach the log file."""
    logger = setup_logging(_config(tmp_path), stage="map")
    logger.debug("scan 12 fused")

    log_files = list(tmp_path.glob("markernav_map_*.log"))
    assert len(log_files) == 1
    assert "scan 12 fused" in log_files[0].read_text()


def test_setup_logging_replaces_handlers(tmp_path):
    """Test repeated setup does not stack handlers."""
    setup_logging(_config(tmp_path))
    logger = setup_logging(_config(tmp_path))

    assert len(logger.handlers) == 2


def test_setup_logging_rejects_unknown_level(tmp_path):
    """Test an unknown LOG_LEVEL is a configuration error."""
    with pytest.raises(ConfigurationError):
        setup_logging(_config(tmp_path, "CHATTY"))


def test_parse_level_is_case_insensitive():
    """Test level names are matched without case."""
    assert parse_level("debug") == logging.DEBUG
    assert parse_level("Warning") == logging.WARNING


def test_log_file_name_tags_stage():
    """Test log file names carry the stage and a timestamp."""
    now = datetime(2024, 3, 5, 14, 7, 9)

    assert log_file_name("place", now) == "markernav_place_20240305_140709.log"
    assert log_file_name(now=now) == "markernav_20240305_140709.log"
    assert re.match(r"markernav_\d{8}_\d{6}\.log", log_file_name())
