"""
Synthetic desk scenarios: a board point sliding toward the camera at constant
speed, and noisy pixel detections of it.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass

import numpy as np

from vistrack.exceptions import TrajectoryError, UnknownPresetError
from vistrack.geometry import (
    DEFAULT_CAMERA,
    CameraModel,
    HomPoint,
    Pixel,
    depth,
    normalize,
    project,
)
from vistrack.particles import make_rng
from vistrack.tracks import GroundTruthTrack, ObservationTrack

logger = logging.getLogger(__name__)

MID_END_DEPTH = 150.0
"""
Depth (cm) of the mid-end point, the middle of the far edge of the table.
Both presets start at this depth.
"""

MID_END_POINT = HomPoint(0.0, 0.0, MID_END_DEPTH)
"""The world reference point, and the filters' default starting estimate"""

PRESETS: dict[str, float] = {
    "left36": -36.0,
    "right30": 30.0,
}
"""Horizontal start offset (cm) from the mid-end point, by preset name"""


@dataclass(frozen=True)
class ScenarioConfig:
    """
    A point moving along the optical axis by ``d`` per frame, observed with
    Gaussian pixel noise.
    """

    start: HomPoint
    """Position at frame 0 (cm)"""

    d: float = -0.5
    """Displacement along ``z`` per frame (cm). Negative is toward the camera"""

    frames: int = 60
    """Number of frames"""

    pixel_noise_std: float = 1.0
    """Standard deviation of the detector noise on each pixel axis (px)"""

    camera: CameraModel = DEFAULT_CAMERA

    seed: int = 0
    """Seed of the detector noise"""

    def __post_init__(self):
        if self.frames < 1:
            raise ValueError(f"Scenario needs at least one frame, got {self.frames}")
        if not self.pixel_noise_std >= 0:
            raise ValueError(
                f"Pixel noise must be non-negative, got {self.pixel_noise_std}"
            )

    def with_overrides(
        self,
        *,
        frames: int | None = None,
        pixel_noise_std: float | None = None,
        seed: int | None = None,
        z0: float | None = None,
        camera: CameraModel | None = None,
    ) -> ScenarioConfig:
        changes: dict = {}
        if frames is not None:
            changes["frames"] = frames
        if pixel_noise_std is not None:
            changes["pixel_noise_std"] = pixel_noise_std
        if seed is not None:
            changes["seed"] = seed
        if camera is not None:
            changes["camera"] = camera
        if z0 is not None:
            start = normalize(self.start)
            changes["start"] = HomPoint(start.x, start.y, z0)
        return dataclasses.replace(self, **changes)


def preset(name: str, z0: float = MID_END_DEPTH) -> ScenarioConfig:
    """
    One of the two desk scenarios: ``left36`` starts 36 cm left of the
    mid-end point, ``right30`` 30 cm right of it.
    """
    try:
        offset = PRESETS[name]
    except KeyError:
        raise UnknownPresetError(
            f"Unknown scenario '{name}'. Choose one of: {', '.join(PRESETS)}"
        ) from None
    return ScenarioConfig(start=HomPoint(offset, 0.0, z0))


def generate_truth(cfg: ScenarioConfig) -> GroundTruthTrack:
    start = normalize(cfg.start)
    track = GroundTruthTrack()
    for t in range(cfg.frames):
        # t·d directly, so frame t carries no accumulated rounding
        point = HomPoint(start.x, start.y, start.z + t * cfg.d)
        if not depth(cfg.camera, point) > 0:
            raise TrajectoryError(
                f"Frame {t}: point ({point.x}, {point.y}, {point.z}) "
                "is not in front of the camera"
            )
        track.append(t, point)
    return track


def observe(
    truth: GroundTruthTrack,
    cam: CameraModel,
    sigma: float,
    rng: int | np.random.Generator,
) -> ObservationTrack:
    """
    Project every true position and add independent zero-mean Gaussian
    noise with standard deviation ``sigma`` to each pixel axis.
    """
    if not sigma >= 0:
        raise ValueError(f"Pixel noise must be non-negative, got {sigma}")
    rng = make_rng(rng)
    if sigma > 0:
        noise = rng.normal(0.0, sigma, size=(len(truth), 2))
    else:
        noise = np.zeros((len(truth), 2))

    track = ObservationTrack()
    for (frame, point), (eu, ev) in zip(truth, noise):
        exact = project(cam, point)
        track.append(frame, Pixel(exact.u + float(eu), exact.v + float(ev)))
    return track


def simulate(cfg: ScenarioConfig) -> tuple[GroundTruthTrack, ObservationTrack]:
    truth = generate_truth(cfg)
    observations = observe(truth, cfg.camera, cfg.pixel_noise_std, cfg.seed)
    logger.info(
        "Simulated %d frames from (%g, %g, %g), noise %g px",
        cfg.frames,
        cfg.start.x,
        cfg.start.y,
        cfg.start.z,
        cfg.pixel_noise_std,
    )
    return truth, observations
