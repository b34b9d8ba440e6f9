"""Laser scan preprocessing."""
from dataclasses import dataclass

import numpy as np

from src.core.exceptions import InvalidInputError, UnusableScanError

RANGE_CEILING = 3.5


@dataclass(frozen=True, eq=False)
class CleanScan:
    """Finite ranges in (0, ceiling] with the raw beam order preserved."""

    ranges: np.ndarray
    bearings: np.ndarray
    ceiling: float = RANGE_CEILING

    def __post_init__(self):
        ranges = np.asarray(self.ranges, dtype=float)
        bearings = np.asarray(self.bearings, dtype=float)
        if ranges.shape != bearings.shape or ranges.ndim != 1:
            raise InvalidInputError("Ranges and bearings must be 1D arrays of equal length")
        if ranges.size and not (
            np.all(np.isfinite(ranges)) and np.all(ranges > 0) and np.all(ranges <= self.ceiling)
        ):
            raise InvalidInputError(f"Clean ranges must be finite and in (0, {self.ceiling}]")
        object.__setattr__(self, "ranges", ranges)
        object.__setattr__(self, "bearings", bearings)

    def __len__(self) -> int:
        return self.ranges.size


def preprocess_scan(
    raw: np.ndarray,
    bearings: np.ndarray,
    ceiling: float = RANGE_CEILING,
) -> CleanScan:
    """
    Clamp and repair a raw scan.

    Readings beyond the ceiling (including ``inf``) are set to the ceiling,
    non-positive readings count as missing, and missing readings are filled
    by linear interpolation over beam index between the nearest valid
    neighbours; leading and trailing gaps take the nearest valid value.

    Args:
        raw: Raw per-beam ranges in meters
        bearings: Beam bearings in radians, same length as ``raw``
        ceiling: Range ceiling in meters

    Returns:
        Cleaned scan

    Raises:
        UnusableScanError: If no beam carries a usable reading
    """
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 1 or raw.size == 0:
        raise InvalidInputError("Scan must be a non-empty 1D array")
    ranges = np.where(raw > ceiling, ceiling, raw)
    ranges = np.where(ranges > 0, ranges, np.nan)

    valid = np.isfinite(ranges)
    if not valid.any():
        raise UnusableScanError("Scan holds no usable reading")
    index = np.arange(ranges.size)
    # np.interp holds the end values outside the valid span
    ranges[~valid] = np.interp(index[~valid], index[valid], ranges[valid])
    return CleanScan(ranges=ranges, bearings=bearings, ceiling=ceiling)
