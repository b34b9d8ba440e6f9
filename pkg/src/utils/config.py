"""Configuration management for MarkerNav."""
import os
from pathlib import Path

from dotenv import load_dotenv

# Load .env file if it exists
load_dotenv()


class Config:
    """Process-level configuration loaded from environment variables."""

    def __init__(self):
        """Initialize configuration from environment."""
        # Directories
        self.data_dir = Path(os.getenv("DATA_DIR", "./data"))
        self.log_dir = Path(os.getenv("LOG_DIR", "./logs"))

        # Logging
        self.log_level = os.getenv("LOG_LEVEL", "INFO")

        # Simulation defaults
        self.default_seed = int(os.getenv("DEFAULT_SEED", "0"))

    @property
    def runs_dir(self) -> Path:
        """Default root for scenario outputs with a relative output directory."""
        return self.data_dir / "runs"

    def resolve_output_dir(self, output_dir: Path) -> Path:
        """Anchor a relative scenario output directory under the runs directory."""
        output_dir = Path(output_dir)
        if output_dir.is_absolute():
            return output_dir
        return self.runs_dir / output_dir

    def ensure_directories_exist(self) -> None:
        """Create necessary directories if they don't exist."""
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.runs_dir.mkdir(parents=True, exist_ok=True)
        self.log_dir.mkdir(parents=True, exist_ok=True)
