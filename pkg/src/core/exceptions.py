"""Exceptions for MarkerNav.

Every error carries the process exit code the CLI reports for it. The codes
are part of the scripting contract and must not be renumbered.
"""
from typing import Iterable, List, Optional, Tuple


class MarkerNavError(Exception):
    """Base class for all domain errors."""
    exit_code = 1


class InvalidInputError(MarkerNavError):
    """Raised for non-finite or malformed numerical input."""
    exit_code = 6


class ConfigurationError(MarkerNavError):
    """Raised when a scenario or parameter block fails validation."""
    exit_code = 6


class UnknownMarkerError(MarkerNavError):
    """Raised when a marker id is not present in the marker database."""
    exit_code = 6

    def __init__(self, marker_id: int):
        super().__init__(f"Marker {marker_id} not in database")
        self.marker_id = marker_id


class NoFixError(MarkerNavError):
    """Raised when a pose-grade marker observation is required but missing."""
    exit_code = 5


class InvalidPoseError(MarkerNavError):
    """Raised when a pose lies outside free space."""
    exit_code = 6


class CollisionError(MarkerNavError):
    """Raised when a motion step would enter an obstacle."""
    exit_code = 7


class UnusableScanError(MarkerNavError):
    """Raised when a laser scan holds no finite reading."""
    exit_code = 6


class GridBoundsError(MarkerNavError):
    """Raised when fusion would write outside the occupancy grid."""
    exit_code = 6


class InfeasibleCoverageError(MarkerNavError):
    """Raised when candidate markers cannot cover every free cell."""
    exit_code = 4

    def __init__(self, message: str, uncovered: Optional[Iterable[Tuple[int, int]]] = None):
        self.uncovered: List[Tuple[int, int]] = list(uncovered or [])
        if self.uncovered:
            preview = ", ".join(f"({r},{c})" for r, c in self.uncovered[:5])
            message = f"{message}; {len(self.uncovered)} uncovered cells, e.g. {preview}"
        super().__init__(message)


class CoverageViolationError(MarkerNavError):
    """Raised when a path point is not covered by any placed marker."""
    exit_code = 4


class NoPathError(MarkerNavError):
    """Raised when source and destination are not connected."""
    exit_code = 3


class InvalidEndpointError(MarkerNavError):
    """Raised when a path endpoint lies on an obstacle or off the map."""
    exit_code = 3


class LocalizationLostError(MarkerNavError):
    """Raised when no marker fix arrives within the dead-reckoning horizon."""
    exit_code = 5


class EmptyPointSetError(MarkerNavError):
    """Raised when a metric needs points and none are available."""
    exit_code = 6
