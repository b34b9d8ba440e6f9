"""Abstract interfaces for artifact storage."""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple

from src.core.models import Marker, TrajectorySample


@dataclass(frozen=True)
class RunHeader:
    """Seed and parameter block embedded in every artifact."""

    seed: int = 0
    params: Dict[str, Any] = field(default_factory=dict)


class ArtifactRepository(ABC):
    """Interface for reading and writing run artifacts."""

    @abstractmethod
    def save_grid(self, name: str, grid, header: RunHeader) -> None:
        """
        Save an occupancy grid as PGM plus a text sidecar.

        Args:
            name: Artifact name without extension
            grid: OccupancyGrid to save
            header: Seed and parameters that produced it
        """
        pass

    @abstractmethod
    def load_grid(self, name: str):
        """
        Load an occupancy grid saved by :meth:`save_grid`.

        Args:
            name: Artifact name or path of the PGM file

        Returns:
            OccupancyGrid

        Raises:
            InvalidInputError: If the file is missing or malformed
        """
        pass

    @abstractmethod
    def save_markers(self, name: str, markers: Iterable[Marker], header: RunHeader) -> None:
        """Save markers as CSV."""
        pass

    @abstractmethod
    def load_markers(self, name: str) -> List[Marker]:
        """Load markers from CSV."""
        pass

    @abstractmethod
    def save_trajectory(self, name: str, samples: Sequence[TrajectorySample], header: RunHeader) -> None:
        """Save a trajectory log as CSV."""
        pass

    @abstractmethod
    def load_trajectory(self, name: str) -> List[TrajectorySample]:
        """Load a trajectory log from CSV."""
        pass

    @abstractmethod
    def save_cells(self, name: str, cells: Iterable[Tuple[int, int]], header: RunHeader) -> None:
        """Save a list of (row, col) cells as CSV."""
        pass

    @abstractmethod
    def save_table(self, name: str, columns: Sequence[str], rows: Iterable[Sequence[Any]], header: RunHeader) -> None:
        """Save arbitrary rows as CSV."""
        pass

    @abstractmethod
    def save_text(self, name: str, text: str, header: RunHeader) -> None:
        """Save a plain-text report."""
        pass

    @abstractmethod
    def save_path_overlay(self, name: str, grid, cells: Iterable[Tuple[int, int]], header: RunHeader) -> None:
        """Save a grid with a path drawn over it."""
        pass

    @abstractmethod
    def save_world(self, name: str, world, header: RunHeader) -> None:
        """
        Save a ground-truth world as an occupancy grid.

        Args:
            name: Artifact name without extension
            world: WorldModel to save
            header: Seed and parameters that produced it
        """
        pass

    @abstractmethod
    def load_world(self, name: str, markers: Iterable[Marker] = ()):
        """Load a world saved by :meth:`save_world`, installing the given markers."""
        pass

    @abstractmethod
    def save_runtime(self, seconds: float) -> None:
        """Record the wall-clock duration of a run."""
        pass

    @property
    @abstractmethod
    def output_dir(self) -> Path:
        """Directory artifacts are written to."""
        pass
