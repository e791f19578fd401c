from __future__ import annotations

from collections.abc import Iterable, Iterator
from typing import Generic, NamedTuple, TypeVar

import numpy as np
import numpy.typing as npt

from vistrack.exceptions import FrameMismatchError
from vistrack.geometry import HomPoint, Pixel


class TruthSample(NamedTuple):
    frame: int
    """Frame number, starting at 0"""

    point: HomPoint
    """True position (cm)"""


class ObservationSample(NamedTuple):
    frame: int
    """Frame number, starting at 0"""

    pixel: Pixel
    """Measured pixel"""


class EstimateRecord(NamedTuple):
    frame: int
    """Frame number of the observation this estimate follows"""

    x: float
    """Estimated position (cm)"""

    y: float
    z: float

    diag: float
    """
    Filter diagnostic: trace of the position covariance (cm²) for the Kalman
    filter, effective sample size for the particle filter
    """

    @property
    def point(self) -> HomPoint:
        return HomPoint(self.x, self.y, self.z)


S = TypeVar("S", TruthSample, ObservationSample)


class _Track(Generic[S]):
    def __init__(self, samples: Iterable[S] | None = None) -> None:
        self._samples: list[S] = []
        for sample in samples or []:
            self._append(sample)

    def _append(self, sample: S) -> None:
        expected = len(self._samples)
        if sample.frame != expected:
            raise FrameMismatchError(
                f"Expected frame {expected}, got frame {sample.frame}"
            )
        self._samples.append(sample)

    @property
    def frames(self) -> list[int]:
        return [sample.frame for sample in self._samples]

    def __getitem__(self, index: int) -> S:
        return self._samples[index]

    def __iter__(self) -> Iterator[S]:
        for sample in self._samples:
            yield sample

    def __len__(self) -> int:
        return len(self._samples)

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self._samples == other._samples


class GroundTruthTrack(_Track[TruthSample]):
    """
    True positions of the tracked point, one per frame. Frames are
    consecutive from 0.
    """

    def append(self, frame: int, point: HomPoint) -> None:
        self._append(TruthSample(frame, point))

    def as_array(self) -> npt.NDArray[np.float64]:
        """Euclidean positions, shape ``(T, 3)``"""
        if not self._samples:
            return np.empty((0, 3))
        return np.array([sample.point.position for sample in self._samples])


class ObservationTrack(_Track[ObservationSample]):
    """
    Measured pixels of the tracked point, one per frame. Frames are
    consecutive from 0.
    """

    def append(self, frame: int, pixel: Pixel) -> None:
        self._append(ObservationSample(frame, Pixel(*pixel)))

    def as_array(self) -> npt.NDArray[np.float64]:
        """Pixels, shape ``(T, 2)``"""
        if not self._samples:
            return np.empty((0, 2))
        return np.array([tuple(sample.pixel) for sample in self._samples])


def estimates_array(estimates: Iterable[EstimateRecord]) -> npt.NDArray[np.float64]:
    """Estimated positions, shape ``(T, 3)``"""
    rows = [(e.x, e.y, e.z) for e in estimates]
    if not rows:
        return np.empty((0, 3))
    return np.array(rows, dtype=np.float64)
