"""File-based artifact repository: PGM grids, CSV tables and text reports."""
import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from src.core.exceptions import InvalidInputError
from src.core.interfaces import ArtifactRepository, RunHeader
from src.core.models import Marker, TrajectorySample
from src.mapping.grid import OCCUPIED_THRESHOLD, UNKNOWN, OccupancyGrid
from src.sim.world import WorldModel

PGM_UNKNOWN = 205
PATH_VALUE = 128

MARKER_COLUMNS = ["id", "x_m", "y_m", "theta_deg", "size_cm", "faces"]
TRAJECTORY_COLUMNS = ["t_s", "x_m", "y_m", "theta_rad", "kind", "tracked_marker_id", "v", "w"]


def encode_pgm_values(cells: np.ndarray) -> np.ndarray:
    """Map occupancy values to gray levels: -1 -> 205, p -> floor(254 - 2.54 p + 0.5)."""
    cells = np.asarray(cells)
    gray = np.floor(254.0 - 2.54 * cells.astype(float) + 0.5)
    return np.where(cells == UNKNOWN, PGM_UNKNOWN, gray).astype(np.uint8)


def decode_pgm_values(gray: np.ndarray) -> np.ndarray:
    """Inverse of :func:`encode_pgm_values` for integer occupancy values."""
    gray = np.asarray(gray, dtype=float)
    cells = np.clip(np.rint((254.0 - gray) / 2.54), 0, 100)
    return np.where(gray == PGM_UNKNOWN, UNKNOWN, cells).astype(np.int16)


def header_lines(header: RunHeader) -> List[str]:
    return [f"seed={header.seed}", f"params={json.dumps(header.params, sort_keys=True)}"]


def write_pgm(path: Path, gray: np.ndarray) -> None:
    """Write an 8-bit binary PGM, row 0 of ``gray`` at the bottom."""
    image = Image.fromarray(np.ascontiguousarray(np.flipud(np.asarray(gray, dtype=np.uint8))))
    image.save(path, format="PPM")


def read_pgm(path: Path) -> np.ndarray:
    """
    Read an 8-bit PGM (binary or ASCII).

    Returns:
        Gray levels with row 0 at the bottom

    Raises:
        InvalidInputError: If the file is missing or not an 8-bit grayscale image
    """
    path = Path(path)
    if not path.exists():
        raise InvalidInputError(f"PGM file not found: {path}")
    try:
        with Image.open(path) as image:
            if image.mode != "L":
                raise InvalidInputError(f"{path} is not an 8-bit grayscale PGM (mode {image.mode})")
            gray = np.asarray(image, dtype=np.uint8)
    except (UnidentifiedImageError, OSError, ValueError) as e:
        raise InvalidInputError(f"Unreadable PGM {path}: {e}") from e
    return np.flipud(gray).copy()


def _read_rows(path: Path) -> List[Dict[str, str]]:
    path = Path(path)
    if not path.exists():
        raise InvalidInputError(f"File not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        lines = [line for line in f if not line.startswith("#")]
    return list(csv.DictReader(lines))


def _format(value: Any) -> str:
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else str(value)
    return str(value)


class FileRepository(ArtifactRepository):
    """Store artifacts as files in one output directory."""

    def __init__(self, output_dir: Path):
        """
        Initialize file repository.

        Args:
            output_dir: Directory all artifacts are written to
        """
        self._output_dir = Path(output_dir)
        self._output_dir.mkdir(parents=True, exist_ok=True)

    @property
    def output_dir(self) -> Path:
        return self._output_dir

    def path(self, name: Union[str, Path], suffix: str) -> Path:
        """Resolve an artifact name (or an explicit file path) to a path."""
        name = Path(name)
        if name.suffix != suffix:
            name = Path(f"{name}{suffix}")
        if name.is_absolute() or len(name.parts) > 1:
            return name
        return self.output_dir / name

    def _write_csv(self, path: Path, columns: Sequence[str], rows: Iterable[Sequence[Any]], header: RunHeader) -> None:
        buffer = io.StringIO()
        for line in header_lines(header):
            buffer.write(f"# {line}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format(v) for v in row])
        path.write_text(buffer.getvalue(), encoding="utf-8")

    def _write_sidecar(self, pgm: Path, grid: OccupancyGrid, header: RunHeader) -> None:
        sidecar = {
            "resolution": grid.resolution,
            "origin_col": grid.origin[0],
            "origin_row": grid.origin[1],
            "occupied_thresh": OCCUPIED_THRESHOLD,
            "seed": header.seed,
            "params": json.dumps(header.params, sort_keys=True),
        }
        text = "".join(f"{k}: {_format(v)}\n" for k, v in sidecar.items())
        pgm.with_suffix(".txt").write_text(text, encoding="utf-8")

    def save_grid(self, name: str, grid: OccupancyGrid, header: RunHeader) -> None:
        """Save grid PGM and its ``key: value`` sidecar carrying geometry, seed and params."""
        pgm = self.path(name, ".pgm")
        write_pgm(pgm, encode_pgm_values(grid.cells))
        self._write_sidecar(pgm, grid, header)

    def load_grid(self, name: str) -> OccupancyGrid:
        pgm = self.path(name, ".pgm")
        gray = read_pgm(pgm)
        meta = self._read_sidecar(pgm.with_suffix(".txt"))
        return OccupancyGrid(
            cells=decode_pgm_values(gray),
            resolution=float(meta.get("resolution", 20.0)),
            origin=(float(meta.get("origin_col", 0.0)), float(meta.get("origin_row", 0.0))),
        )

    @staticmethod
    def _read_sidecar(path: Path) -> Dict[str, str]:
        if not path.exists():
            return {}
        meta = {}
        for line in path.read_text(encoding="utf-8").splitlines():
            key, sep, value = line.partition(":")
            if sep:
                meta[key.strip()] = value.strip()
        return meta

    def save_world(self, name: str, world: WorldModel, header: RunHeader) -> None:
        """Save a world bitmap: obstacle 0, free 254, unknown 205."""
        self.save_grid(name, OccupancyGrid(world.occupancy_cells(), world.resolution, world.origin), header)

    def load_world(self, name: str, markers: Iterable[Marker] = ()) -> WorldModel:
        """Load a world bitmap; cells at or above the threshold are obstacles."""
        grid = self.load_grid(name)
        known = grid.cells != UNKNOWN
        obstacles = known & (grid.cells >= OCCUPIED_THRESHOLD)
        return WorldModel(
            obstacles=obstacles,
            free=known & ~obstacles,
            resolution=grid.resolution,
            origin=grid.origin,
            markers=list(markers),
            name=Path(name).stem,
        )

    def save_path_overlay(self, name: str, grid: OccupancyGrid, cells: Iterable[Tuple[int, int]], header: RunHeader) -> None:
        """Save the grid image with path cells painted mid-gray."""
        gray = encode_pgm_values(grid.cells)
        for row, col in cells:
            gray[row, col] = PATH_VALUE
        pgm = self.path(name, ".pgm")
        write_pgm(pgm, gray)
        self._write_sidecar(pgm, grid, header)

    def save_markers(self, name: str, markers: Iterable[Marker], header: RunHeader) -> None:
        rows = [[m.to_dict()[c] for c in MARKER_COLUMNS] for m in sorted(markers, key=lambda m: m.id)]
        self._write_csv(self.path(name, ".csv"), MARKER_COLUMNS, rows, header)

    def load_markers(self, name: str) -> List[Marker]:
        try:
            return [Marker.from_dict(row) for row in _read_rows(self.path(name, ".csv"))]
        except (KeyError, ValueError) as e:
            raise InvalidInputError(f"Malformed marker file {name}: {e}") from e

    def save_trajectory(self, name: str, samples: Sequence[TrajectorySample], header: RunHeader) -> None:
        rows = [[s.to_dict()[c] for c in TRAJECTORY_COLUMNS] for s in samples]
        self._write_csv(self.path(name, ".csv"), TRAJECTORY_COLUMNS, rows, header)

    def load_trajectory(self, name: str) -> List[TrajectorySample]:
        try:
            return [TrajectorySample.from_dict(row) for row in _read_rows(self.path(name, ".csv"))]
        except (KeyError, ValueError) as e:
            raise InvalidInputError(f"Malformed trajectory file {name}: {e}") from e

    def save_cells(self, name: str, cells: Iterable[Tuple[int, int]], header: RunHeader) -> None:
        self._write_csv(self.path(name, ".csv"), ["row", "col"], [(int(r), int(c)) for r, c in cells], header)

    def save_table(self, name: str, columns: Sequence[str], rows: Iterable[Sequence[Any]], header: RunHeader) -> None:
        self._write_csv(self.path(name, ".csv"), columns, rows, header)

    def save_text(self, name: str, text: str, header: RunHeader, suffix: str = ".txt") -> None:
        body = "".join(f"# {line}\n" for line in header_lines(header)) + text
        self.path(name, suffix).write_text(body, encoding="utf-8")

    def save_runtime(self, seconds: float) -> None:
        """Wall-clock runtime, kept apart from the reproducible artifacts."""
        (self.output_dir / "runtime.txt").write_text(f"runtime_s: {seconds:.3f}\n", encoding="utf-8")
