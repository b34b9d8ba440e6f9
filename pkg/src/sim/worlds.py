"""Built-in synthetic worlds.

Every world is an orthogonal floor plan with 1-pixel walls, the first
marker anchored at the origin facing 180 deg, and a scripted mapping route
that keeps consecutive markers within tracking range of each other.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
from scipy import ndimage

from src.core.exceptions import ConfigurationError
from src.core.models import Marker, Pose2D
from src.sim.world import WorldModel

# (x_min, y_min, x_max, y_max) in meters
RectM = Tuple[float, float, float, float]

MARGIN_CELLS = 3


@dataclass
class SyntheticWorld:
    """A world with its scripted mapping route and a navigation loop."""

    world: WorldModel
    route: List[Pose2D]
    loop: List[Pose2D] = field(default_factory=list)


def rasterize_floor_plan(
    free_rects: Sequence[RectM],
    holes: Sequence[RectM] = (),
    resolution: float = 20.0,
) -> Tuple[np.ndarray, np.ndarray, Tuple[float, float]]:
    """
    Rasterize a floor plan given as a union of free rectangles minus holes.

    Walls are the 1-pixel, 8-connected outline of the free area.

    Returns:
        (obstacles, free, origin) with origin the (col, row) of world (0, 0)
    """
    x_min = min(r[0] for r in free_rects)
    y_min = min(r[1] for r in free_rects)
    x_max = max(r[2] for r in free_rects)
    y_max = max(r[3] for r in free_rects)
    pad = MARGIN_CELLS + 1
    origin = (
        float(pad - round(x_min * resolution)),
        float(pad - round(y_min * resolution)),
    )
    width = int(round((x_max - x_min) * resolution)) + 2 * pad
    height = int(round((y_max - y_min) * resolution)) + 2 * pad

    def cells(rect: RectM) -> Tuple[slice, slice]:
        c0 = int(round(rect[0] * resolution + origin[0]))
        c1 = int(round(rect[2] * resolution + origin[0]))
        r0 = int(round(rect[1] * resolution + origin[1]))
        r1 = int(round(rect[3] * resolution + origin[1]))
        return slice(r0, r1), slice(c0, c1)

    free = np.zeros((height, width), dtype=bool)
    for rect in free_rects:
        free[cells(rect)] = True
    for rect in holes:
        free[cells(rect)] = False
    obstacles = ndimage.binary_dilation(free, structure=np.ones((3, 3), dtype=bool)) & ~free
    return obstacles, free, origin


def _poses(points: Sequence[Tuple[float, float]]) -> List[Pose2D]:
    """Waypoints heading toward their successor; the last keeps its predecessor's."""
    poses = []
    for i, (x, y) in enumerate(points):
        nx, ny = points[i + 1] if i + 1 < len(points) else (2 * x - points[i - 1][0], 2 * y - points[i - 1][1])
        poses.append(Pose2D(x, y, math.atan2(ny - y, nx - x)))
    return poses


def _markers(positions: Sequence[Tuple[float, float]], faces: int, size: float) -> List[Marker]:
    markers = []
    for i, (x, y) in enumerate(positions):
        markers.append(Marker(id=i, pose=Pose2D(x, y, math.pi), faces=faces, size=size))
    return markers


def corridor(length_m: float = 10.0, width_m: float = 2.16, faces: int = 4, size: float = 0.20) -> SyntheticWorld:
    """Straight corridor along +x; markers every 3 m near one wall."""
    y0 = -0.3
    center = y0 + width_m / 2.0
    obstacles, free, origin = rasterize_floor_plan([(-0.5, y0, length_m - 0.5, y0 + width_m)])
    positions = [(x, 0.0) for x in np.arange(0.0, length_m - 0.5, 3.0)]
    world = WorldModel(obstacles, free, 20.0, origin, _markers(positions, faces, size), "corridor")
    end = length_m - 1.2
    route = _poses([(0.4, center), (end, center)])
    loop = _poses([(0.4, center), (end / 2.0, center), (end, center)])
    return SyntheticWorld(world, route, loop)


def room(side_m: float = 4.0, faces: int = 4, size: float = 0.20) -> SyntheticWorld:
    """Square empty room."""
    obstacles, free, origin = rasterize_floor_plan([(-0.5, -0.5, side_m - 0.5, side_m - 0.5)])
    far = side_m - 1.0
    world = WorldModel(obstacles, free, 20.0, origin, _markers([(0.0, 0.0), (far, far)], faces, size), "room")
    route = _poses([(0.6, 0.3), (far, 0.3), (far, far - 0.4), (0.6, far - 0.4)])
    loop = _poses([(0.6, 0.3), (far, 0.3), (far - 0.5, far - 0.5), (0.6, 0.3)])
    return SyntheticWorld(world, route, loop)


def l_room(faces: int = 4, size: float = 0.20) -> SyntheticWorld:
    """L-shaped space: a 6 m leg along x and a 6 m leg along y."""
    obstacles, free, origin = rasterize_floor_plan([
        (-0.5, -0.5, 5.5, 1.5),
        (3.5, -0.5, 5.5, 5.5),
    ])
    positions = [(0.0, 0.0), (3.0, 0.5), (4.5, 3.5)]
    world = WorldModel(obstacles, free, 20.0, origin, _markers(positions, faces, size), "l_room")
    route = _poses([(0.5, 0.6), (4.4, 0.6), (4.4, 4.8)])
    return SyntheticWorld(world, route, route)


def plus(arm_m: float = 3.0, width_m: float = 1.2, faces: int = 4, size: float = 0.20) -> SyntheticWorld:
    """Two corridors crossing at the origin."""
    h = width_m / 2.0
    obstacles, free, origin = rasterize_floor_plan([
        (-arm_m, -h, arm_m, h),
        (-h, -arm_m, h, arm_m),
    ])
    reach = arm_m - 0.5
    positions = [(0.0, 0.0), (reach, 0.0), (0.0, reach), (-reach, 0.0), (0.0, -reach)]
    world = WorldModel(obstacles, free, 20.0, origin, _markers(positions, faces, size), "plus")
    route = _poses([(-reach, 0.3), (reach, 0.3), (0.3, 0.3), (0.3, reach), (0.3, -reach)])
    loop = _poses([(-reach, 0.3), (0.3, 0.3), (0.3, reach)])
    return SyntheticWorld(world, route, loop)


def lab(faces: int = 4, size: float = 0.20) -> SyntheticWorld:
    """8 m x 6 m lab with a pillar in the middle."""
    obstacles, free, origin = rasterize_floor_plan(
        [(-0.5, -0.5, 7.5, 5.5)],
        holes=[(3.0, 2.0, 4.5, 3.0)],
    )
    positions = [(0.0, 0.0), (3.75, 1.0), (7.0, 2.5), (3.75, 4.5), (0.5, 3.0)]
    world = WorldModel(obstacles, free, 20.0, origin, _markers(positions, faces, size), "lab")
    route = _poses([(1.0, 0.6), (6.0, 0.6), (6.0, 4.2), (1.5, 4.2), (1.5, 1.2)])
    loop = _poses([(0.8, 0.8), (2.6, 0.8), (1.7, 4.5), (0.8, 0.8)])
    return SyntheticWorld(world, route, loop)


SYNTHETIC_WORLDS: Dict[str, Callable[..., SyntheticWorld]] = {
    "corridor": corridor,
    "lab": lab,
    "l_room": l_room,
    "plus": plus,
    "room": room,
}


def synthetic_world(name: str, **kwargs) -> SyntheticWorld:
    """Build a named synthetic world."""
    try:
        factory = SYNTHETIC_WORLDS[name]
    except KeyError:
        raise ConfigurationError(
            f"Unknown synthetic world '{name}'; choose from {sorted(SYNTHETIC_WORLDS)}"
        ) from None
    return factory(**kwargs)
