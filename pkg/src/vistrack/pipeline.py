"""
Filter runs over whole observation tracks, and the virtual-board overlay used
to check a camera by hand.

Both filters start at frame 0 from their prior and only condition on the
first observation; every later frame is a full predict and update.
"""

from __future__ import annotations

import logging

from vistrack.checks import check_gaussian_state, check_particle_set
from vistrack.config import FilterKind, ParticleConfig, RunConfig
from vistrack.geometry import (
    BoardSpec,
    CameraModel,
    HomPoint,
    Pixel,
    board_corners,
    displace,
    project,
)
from vistrack.kalman import KalmanConfig, kf_init, kf_step, kf_update
from vistrack.particles import make_rng, pf_ess, pf_init, pf_predict, pf_update
from vistrack.tracks import EstimateRecord, ObservationTrack

logger = logging.getLogger(__name__)


def run_ekf(
    obs: ObservationTrack,
    cam: CameraModel,
    cfg: KalmanConfig,
    x0: HomPoint,
) -> list[EstimateRecord]:
    state = kf_init(x0, cfg)
    records: list[EstimateRecord] = []
    for frame, pixel in obs:
        if frame > 0:
            state = kf_step(state, pixel, cam, cfg)
        else:
            state = kf_update(state, pixel, cam, cfg)
        check_gaussian_state(state)
        m = state.mean
        records.append(EstimateRecord(frame, m.x, m.y, m.z, state.trace))
        logger.debug(
            "ekf frame %d: (%.3f, %.3f, %.3f) trace=%.4g",
            frame, m.x, m.y, m.z, state.trace,
        )
    logger.info("EKF processed %d frames", len(records))
    return records


def run_pf(
    obs: ObservationTrack,
    cam: CameraModel,
    cfg: ParticleConfig,
    x0: HomPoint,
    seed: int,
) -> list[EstimateRecord]:
    rng = make_rng(seed)
    particles = pf_init(cfg.particles, x0, cfg.init_spread, rng)
    records: list[EstimateRecord] = []
    for frame, pixel in obs:
        if frame > 0:
            particles = pf_predict(particles, cfg.noise, rng)
        update = pf_update(particles, pixel, cam, rng, cfg.resampler)
        check_particle_set(update.weighted)
        particles, estimate = update.particles, update.estimate
        ess = pf_ess(update.weighted)
        records.append(EstimateRecord(frame, estimate.x, estimate.y, estimate.z, ess))
        logger.debug(
            "pf frame %d: (%.3f, %.3f, %.3f) ess=%.1f",
            frame, estimate.x, estimate.y, estimate.z, ess,
        )
    logger.info("PF processed %d frames with %d particles", len(records), cfg.particles)
    return records


def run_filter(obs: ObservationTrack, config: RunConfig) -> list[EstimateRecord]:
    if config.kind is FilterKind.EKF:
        return run_ekf(obs, config.camera, config.kalman, config.initial_point)
    return run_pf(
        obs, config.camera, config.particle, config.initial_point, config.seed
    )


def calibration_overlay(
    cam: CameraModel,
    board: BoardSpec,
    shift: tuple[float, float, float] = (0.0, 0.0, 0.0),
) -> tuple[list[HomPoint], list[Pixel]]:
    """
    Corners of a virtual board, optionally displaced by ``shift`` (cm), and
    where ``cam`` projects them. Comparing these pixels with the real board
    in the image checks the camera matrix.
    """
    center = displace(board.center, *shift)
    corners = board_corners(
        BoardSpec(center, board.square_size, rows=board.rows, cols=board.cols)
    )
    return corners, [project(cam, corner) for corner in corners]
