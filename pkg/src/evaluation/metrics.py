"""Map and trajectory quality metrics."""
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial import cKDTree
from skimage.morphology import skeletonize

from src.core.exceptions import EmptyPointSetError, InvalidInputError
from src.core.models import TrajectorySample
from src.geometry.transforms import Transform2D
from src.mapping.grid import OCCUPIED_THRESHOLD, OccupancyGrid, binarize_and_thin

logger = logging.getLogger("markernav")


@dataclass(frozen=True, eq=False)
class PointSet2D:
    """(N, 2) point coordinates with their unit."""

    points: np.ndarray
    unit: str = "cells"

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if not np.all(np.isfinite(points)):
            raise InvalidInputError("Point coordinates must be finite")
        object.__setattr__(self, "points", points)

    def __len__(self) -> int:
        return self.points.shape[0]

    def transformed(self, transform: Transform2D) -> "PointSet2D":
        return PointSet2D(transform.apply(self.points) if len(self) else self.points, self.unit)


def _coerce(points: Union[PointSet2D, np.ndarray, Sequence]) -> np.ndarray:
    if isinstance(points, PointSet2D):
        return points.points
    return PointSet2D(points).points


def extract_obstacle_points(
    grid: Union[OccupancyGrid, np.ndarray],
    occ_threshold: int = OCCUPIED_THRESHOLD,
    origin: Optional[Tuple[float, float]] = None,
) -> PointSet2D:
    """
    Threshold, thin and collect the obstacle cells of a map.

    Points are ``(col - origin_col, row - origin_row)`` so maps with different
    extents but a shared world frame are directly comparable.

    Args:
        grid: Occupancy grid, or a boolean obstacle bitmap
        occ_threshold: Occupancy value at or above which a cell is an obstacle
        origin: (col, row) of the world origin; taken from the grid if omitted

    Returns:
        Thinned obstacle cells in cells

    Raises:
        EmptyPointSetError: If the map holds no obstacle
    """
    if isinstance(grid, OccupancyGrid):
        thinned = binarize_and_thin(grid, occ_threshold).astype(bool)
        origin = grid.origin if origin is None else origin
    else:
        thinned = skeletonize(np.asarray(grid, dtype=bool))
        origin = (0.0, 0.0) if origin is None else origin
    rows, cols = np.nonzero(thinned)
    if rows.size == 0:
        raise EmptyPointSetError("Map has no obstacle cells")
    return PointSet2D(np.column_stack([cols - origin[0], rows - origin[1]]), "cells")


def nearest_distances(source, target) -> np.ndarray:
    """Distance from every source point to its nearest target point."""
    src, dst = _coerce(source), _coerce(target)
    if len(src) == 0 or len(dst) == 0:
        raise EmptyPointSetError("Nearest-neighbour query needs two non-empty point sets")
    distances, _ = cKDTree(dst).query(src)
    return distances


def adnn(source, target, symmetric: bool = False) -> float:
    """
    Average distance from each source point to the nearest target point.

    With ``symmetric`` the mean of both directions is returned.
    """
    value = float(np.mean(nearest_distances(source, target)))
    if symmetric:
        value = 0.5 * (value + float(np.mean(nearest_distances(target, source))))
    return value


def rmse(source, target, symmetric: bool = False) -> float:
    """Root mean square of the same nearest-neighbour distances as :func:`adnn`."""
    value = float(np.sqrt(np.mean(nearest_distances(source, target) ** 2)))
    if symmetric:
        reverse = float(np.sqrt(np.mean(nearest_distances(target, source) ** 2)))
        value = 0.5 * (value + reverse)
    return value


def best_fit_transform(a: np.ndarray, b: np.ndarray) -> Transform2D:
    """Least-squares rigid transform mapping paired points ``a`` onto ``b``."""
    centroid_a, centroid_b = a.mean(axis=0), b.mean(axis=0)
    h = (a - centroid_a).T @ (b - centroid_b)
    u, _, vt = np.linalg.svd(h)
    rotation = vt.T @ u.T
    if np.linalg.det(rotation) < 0:
        vt[-1, :] *= -1
        rotation = vt.T @ u.T
    matrix = np.eye(3)
    matrix[:2, :2] = rotation
    matrix[:2, 2] = centroid_b - rotation @ centroid_a
    # rebuild the rotation from its angle
    angle = math.atan2(rotation[1, 0], rotation[0, 0])
    c, s = math.cos(angle), math.sin(angle)
    matrix[:2, :2] = [[c, -s], [s, c]]
    return Transform2D(matrix)


@dataclass(frozen=True, eq=False)
class IcpResult:
    transform: Transform2D
    iterations: int
    residual: float
    degenerate: bool = False


def _is_degenerate(points: np.ndarray) -> bool:
    if points.shape[0] < 3:
        return True
    singular = np.linalg.svd(points - points.mean(axis=0), compute_uv=False)
    return singular[-1] <= 1e-9 * max(singular[0], 1.0)


def _icp_from(src: np.ndarray, tree: cKDTree, dst: np.ndarray, start: Transform2D, max_iter: int, tol: float):
    transform = start
    previous = math.inf
    residual = math.inf
    for iteration in range(1, max_iter + 1):
        moved = transform.apply(src)
        distances, indices = tree.query(moved)
        residual = float(np.sqrt(np.mean(distances ** 2)))
        if abs(previous - residual) < tol:
            return transform, iteration, residual
        previous = residual
        transform = best_fit_transform(moved, dst[indices]) @ transform
    distances, _ = tree.query(transform.apply(src))
    return transform, max_iter, float(np.sqrt(np.mean(distances ** 2)))


def icp_align(
    source,
    target,
    max_iter: int = 50,
    tol: float = 1e-9,
    start_angles_deg: Iterable[float] = tuple(range(-45, 50, 5)),
) -> IcpResult:
    """
    Rigidly align a source point set to a target with Iterative Closest Point.

    Every run alternates nearest-neighbour matching with the closed-form
    SVD fit and stops once the RMS residual changes by less than ``tol``.
    Runs start from the identity and from centroid alignment at each of
    ``start_angles_deg``; the run with the lowest residual wins.

    Args:
        source: Points to move (evaluated map)
        target: Fixed points (ground truth)
        max_iter: Iteration cap per run
        tol: Residual-change convergence threshold
        start_angles_deg: Initial rotations tried after centroid alignment

    Returns:
        Transform mapping source onto target; identity with ``degenerate``
        set when either set has fewer than three points or is collinear

    Raises:
        EmptyPointSetError: If a set is empty
    """
    src, dst = _coerce(source), _coerce(target)
    if len(src) == 0 or len(dst) == 0:
        raise EmptyPointSetError("ICP needs two non-empty point sets")
    if _is_degenerate(src) or _is_degenerate(dst):
        logger.warning("ICP input is degenerate; returning identity")
        residual = float(np.sqrt(np.mean(nearest_distances(src, dst) ** 2)))
        return IcpResult(Transform2D.identity(), 0, residual, degenerate=True)

    tree = cKDTree(dst)
    starts = [Transform2D.identity()]
    centroid_src, centroid_dst = src.mean(axis=0), dst.mean(axis=0)
    for angle_deg in start_angles_deg:
        angle = math.radians(angle_deg)
        c, s = math.cos(angle), math.sin(angle)
        rotation = np.array([[c, -s], [s, c]])
        matrix = np.eye(3)
        matrix[:2, :2] = rotation
        matrix[:2, 2] = centroid_dst - rotation @ centroid_src
        starts.append(Transform2D(matrix))

    best = None
    total_iterations = 0
    for start in starts:
        transform, iterations, residual = _icp_from(src, tree, dst, start, max_iter, tol)
        total_iterations += iterations
        if best is None or residual < best[1] - 1e-12:
            best = (transform, residual)
    logger.debug(f"ICP residual {best[1]:.4f} after {total_iterations} iterations over {len(starts)} starts")
    return IcpResult(best[0], total_iterations, best[1])


def _as_track(samples) -> np.ndarray:
    if len(samples) and isinstance(samples[0], TrajectorySample):
        return np.array([[s.t, s.pose.x, s.pose.y] for s in samples], dtype=float)
    return np.asarray(samples, dtype=float).reshape(-1, 3)


def associate(estimated, truth, max_gap: float = 0.02) -> Tuple[np.ndarray, np.ndarray]:
    """
    Pair every estimated sample with the nearest ground-truth timestamp.

    Returns:
        Paired (N, 2) estimated and ground-truth positions

    Raises:
        EmptyPointSetError: If no pair lies within ``max_gap`` seconds
    """
    est, gt = _as_track(estimated), _as_track(truth)
    if len(est) == 0 or len(gt) == 0:
        raise EmptyPointSetError("Trajectories must not be empty")
    order = np.argsort(gt[:, 0], kind="stable")
    gt = gt[order]
    idx = np.clip(np.searchsorted(gt[:, 0], est[:, 0]), 1, len(gt) - 1) if len(gt) > 1 else np.zeros(len(est), int)
    if len(gt) > 1:
        left = idx - 1
        closer_left = np.abs(est[:, 0] - gt[left, 0]) <= np.abs(gt[idx, 0] - est[:, 0])
        idx = np.where(closer_left, left, idx)
    keep = np.abs(gt[idx, 0] - est[:, 0]) <= max_gap
    if not keep.any():
        raise EmptyPointSetError(f"No timestamps associate within {max_gap} s")
    return est[keep, 1:], gt[idx[keep], 1:]


def ate(estimated, truth, align: bool = True, max_gap: float = 0.02) -> float:
    """
    Absolute trajectory error in meters.

    Args:
        estimated: Estimated samples, or (N, 3) rows of (t, x, y)
        truth: Ground-truth samples in the same form
        align: Rigidly align the estimate to the truth before measuring
        max_gap: Largest timestamp difference accepted as a pair

    Returns:
        RMS position error over associated pairs
    """
    est, gt = associate(estimated, truth, max_gap)
    if align and len(est) >= 2 and not _is_degenerate(est):
        est = best_fit_transform(est, gt).apply(est)
    elif align and len(est) >= 1:
        est = est - est.mean(axis=0) + gt.mean(axis=0)
    errors = np.hypot(*(est - gt).T)
    return float(np.sqrt(np.mean(errors ** 2)))
