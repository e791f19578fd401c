"""
Sequential importance resampling over 3D positions.

Each cycle moves every particle by uniform noise, weights it by how close its
projection falls to the observed pixel, and resamples. Resampling only
repeats or drops existing particles; it never creates new positions.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator
from dataclasses import dataclass
from enum import Enum, auto
from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from vistrack.exceptions import DegenerateWeightsError
from vistrack.geometry import CameraModel, HomPoint, Pixel, normalize, project_many

logger = logging.getLogger(__name__)


class Resampler(Enum):
    """
    Resampling schemes.
    """

    SYSTEMATIC = auto()
    """
    Low-variance resampling: one uniform offset in ``[0, 1/N)`` and ``N``
    equal strides over the cumulative weights. Particle ``i`` is copied
    ``⌊N·wᵢ⌋`` or ``⌈N·wᵢ⌉`` times.
    """

    MULTINOMIAL = auto()
    """
    ``N`` independent draws from the categorical distribution of the
    weights.
    """


class Range(NamedTuple):
    lo: float
    hi: float


@dataclass(frozen=True)
class TransitionNoise:
    """
    Uniform displacement added to every particle on each predict (cm).
    The defaults model forward motion of 0.1 to 1 cm toward the camera and a
    horizontal uncertainty bubble 80 cm wide.
    """

    z_range: tuple[float, float] = (-1.0, -0.1)
    """Displacement along the optical axis"""

    x_range: tuple[float, float] = (-40.0, 40.0)
    """Horizontal displacement"""

    y_range: tuple[float, float] = (0.0, 0.0)
    """Vertical displacement. Zero: the board slides on a table"""

    def __post_init__(self):
        for name in ("x_range", "y_range", "z_range"):
            lo, hi = getattr(self, name)
            if not (np.isfinite(lo) and np.isfinite(hi)):
                raise ValueError(f"{name} must be finite, got ({lo}, {hi})")
            if lo > hi:
                raise ValueError(f"{name} has lo > hi: ({lo}, {hi})")
            object.__setattr__(self, name, Range(float(lo), float(hi)))

    @property
    def lows(self) -> npt.NDArray[np.float64]:
        return np.array([self.x_range[0], self.y_range[0], self.z_range[0]])

    @property
    def highs(self) -> npt.NDArray[np.float64]:
        return np.array([self.x_range[1], self.y_range[1], self.z_range[1]])


class Particle(NamedTuple):
    point: HomPoint
    """Candidate position, canonical"""

    weight: float
    """Normalized weight"""


@dataclass(frozen=True, eq=False)
class ParticleSet:
    """
    Weighted set of ``N`` candidate positions. Positions are stored as an
    ``(N, 3)`` array of Euclidean coordinates (the canonical homogeneous
    points with ``w = 1`` dropped).
    """

    points: npt.NDArray[np.float64]
    """Positions (cm), shape ``(N, 3)``"""

    weights: npt.NDArray[np.float64]
    """Weights, shape ``(N,)``"""

    def __post_init__(self):
        points = np.array(self.points, dtype=np.float64)
        weights = np.array(self.weights, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 3 or points.shape[0] < 1:
            raise ValueError(f"Expected an (N, 3) array of points, got {points.shape}")
        if weights.shape != (points.shape[0],):
            raise ValueError(
                f"Expected {points.shape[0]} weights, got {weights.shape}"
            )
        points.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def particles(self) -> list[Particle]:
        return list(iter(self))

    def __iter__(self) -> Iterator[Particle]:
        for p, w in zip(self.points, self.weights):
            yield Particle(HomPoint(float(p[0]), float(p[1]), float(p[2])), float(w))

    def __len__(self) -> int:
        return self.count


def make_rng(seed: int | np.random.Generator) -> np.random.Generator:
    """
    Deterministic generator for a seed. A generator passed in is returned
    as is, so callers can share one stream across steps.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"Seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.default_rng(seed)


def _normalized(weights: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    total = weights.sum()
    if not total > 0:
        raise DegenerateWeightsError("All particle weights are zero")
    return weights / total


def pf_init(
    n: int,
    center: HomPoint,
    spread: TransitionNoise,
    rng: int | np.random.Generator,
) -> ParticleSet:
    """
    ``n`` particles drawn uniformly from the box ``center + spread``, with
    equal weights.
    """
    if n < 1:
        raise ValueError(f"Particle count must be at least 1, got {n}")
    rng = make_rng(rng)
    c = normalize(center).position
    points = c + rng.uniform(spread.lows, spread.highs, size=(n, 3))
    return ParticleSet(points, np.full(n, 1.0 / n))


def pf_predict(
    s: ParticleSet,
    noise: TransitionNoise,
    rng: np.random.Generator,
) -> ParticleSet:
    """
    Add independent uniform noise to every coordinate of every particle.
    Weights are kept.
    """
    moved = s.points + rng.uniform(noise.lows, noise.highs, size=s.points.shape)
    return ParticleSet(moved, s.weights)


def raw_weights(
    points: npt.ArrayLike,
    z: Pixel,
    cam: CameraModel,
) -> npt.NDArray[np.float64]:
    """
    Unnormalized weights ``1 / (1 + |z - p|²)`` where ``p`` is the projection
    of each point and ``|.|`` the Euclidean pixel distance. Points behind the
    camera weigh 0.
    """
    pixels, depths = project_many(cam, points)
    error = np.sum((pixels - np.asarray(z, dtype=np.float64)) ** 2, axis=1)
    weights = np.zeros(len(depths))
    visible = depths > 0
    weights[visible] = 1.0 / (1.0 + error[visible])
    return weights


def pf_weight(s: ParticleSet, z: Pixel, cam: CameraModel) -> ParticleSet:
    return ParticleSet(s.points, _normalized(raw_weights(s.points, z, cam)))


def systematic_indexes(
    weights: npt.NDArray[np.float64],
    rng: np.random.Generator,
) -> npt.NDArray[np.intp]:
    n = len(weights)
    # Compare in units of 1/N so that equal-weight cases stay exact
    cumulative = n * np.cumsum(_normalized(weights))
    cumulative[-1] = n
    positions = np.arange(n) + rng.uniform(0.0, 1.0)
    return np.searchsorted(cumulative, positions, side="right")


def multinomial_indexes(
    weights: npt.NDArray[np.float64],
    rng: np.random.Generator,
) -> npt.NDArray[np.intp]:
    n = len(weights)
    cumulative = np.cumsum(_normalized(weights))
    cumulative[-1] = 1.0
    return np.searchsorted(cumulative, rng.uniform(0.0, 1.0, size=n), side="right")


def _from_indexes(s: ParticleSet, indexes: npt.NDArray[np.intp]) -> ParticleSet:
    return ParticleSet(s.points[indexes], np.full(s.count, 1.0 / s.count))


def pf_resample_systematic(s: ParticleSet, rng: np.random.Generator) -> ParticleSet:
    return _from_indexes(s, systematic_indexes(s.weights, rng))


def pf_resample_multinomial(s: ParticleSet, rng: np.random.Generator) -> ParticleSet:
    return _from_indexes(s, multinomial_indexes(s.weights, rng))


def resample(
    s: ParticleSet,
    rng: np.random.Generator,
    kind: Resampler = Resampler.SYSTEMATIC,
) -> ParticleSet:
    if kind is Resampler.SYSTEMATIC:
        return pf_resample_systematic(s, rng)
    elif kind is Resampler.MULTINOMIAL:
        return pf_resample_multinomial(s, rng)
    raise ValueError(f"Unknown resampler {kind}")


def pf_estimate(s: ParticleSet) -> HomPoint:
    """Weighted mean position"""
    return HomPoint.from_array(np.average(s.points, weights=s.weights, axis=0))


def pf_ess(s: ParticleSet) -> float:
    """Effective sample size ``1 / Σwᵢ²``, between 1 and N"""
    return float(1.0 / np.sum(np.square(s.weights)))


class ParticleUpdate(NamedTuple):
    particles: ParticleSet
    """Resampled set, equal weights"""

    estimate: HomPoint
    """Weighted mean taken before resampling"""

    weighted: ParticleSet
    """The set after weighting, before resampling"""


def pf_update(
    s: ParticleSet,
    z: Pixel,
    cam: CameraModel,
    rng: np.random.Generator,
    resampler: Resampler = Resampler.SYSTEMATIC,
) -> ParticleUpdate:
    """
    Weight, estimate and resample: the observation half of a cycle.
    """
    weighted = pf_weight(s, z, cam)
    estimate = pf_estimate(weighted)
    logger.debug("update: ess=%.1f of %d", pf_ess(weighted), weighted.count)
    return ParticleUpdate(resample(weighted, rng, resampler), estimate, weighted)


def pf_step(
    s: ParticleSet,
    z: Pixel,
    cam: CameraModel,
    noise: TransitionNoise,
    rng: np.random.Generator,
    resampler: Resampler = Resampler.SYSTEMATIC,
) -> tuple[ParticleSet, HomPoint]:
    """
    One predict, weight, estimate and resample cycle.

    Returns the resampled set and the weighted estimate taken before
    resampling.
    """
    update = pf_update(pf_predict(s, noise, rng), z, cam, rng, resampler)
    return update.particles, update.estimate
