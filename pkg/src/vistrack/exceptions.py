from __future__ import annotations

from pathlib import Path


class TrackingError(Exception):
    """Base class for errors raised by vistrack."""


class GeometryError(TrackingError):
    """A point cannot be represented or projected."""


class DegeneratePointError(GeometryError):
    """A homogeneous point has a zero scale component."""


class PointBehindCameraError(GeometryError):
    """A point has non-positive projective depth."""


class NumericalError(TrackingError):
    """A filter step cannot be computed."""


class SingularMatrixError(NumericalError):
    """The innovation covariance is not invertible."""


class DegenerateWeightsError(NumericalError):
    """Every particle weight is zero."""


class DataError(TrackingError):
    """Input data or configuration is invalid."""


class FormatError(DataError):
    """A file row does not match the expected format."""

    def __init__(self, path: str | Path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        """File being read"""

        self.line = line
        """1-based line number of the offending row"""


class FrameMismatchError(DataError):
    """Frame numbers are not consecutive, or two tracks do not line up."""


class ConfigError(DataError):
    """A configuration value is missing, unknown or out of range."""


class TrajectoryError(DataError):
    """A generated trajectory leaves the camera frustum."""


class UnknownPresetError(DataError):
    """No scenario preset with the requested name exists."""
