"""
Run parameters written next to every output file.

A CSV written to ``name.csv`` gets a sidecar ``name.meta.json`` holding the
camera, the filter settings and the seed that produced it. Keys are written
in a fixed order and floats in their shortest round-trip form, so identical
runs give identical bytes.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Mapping
from pathlib import Path
from typing import Any

from vistrack.config import ParticleConfig, RunConfig
from vistrack.geometry import CameraModel, HomPoint, normalize
from vistrack.kalman import KalmanConfig
from vistrack.particles import TransitionNoise
from vistrack.simulator import ScenarioConfig

logger = logging.getLogger(__name__)

METADATA_SUFFIX = ".meta.json"


def metadata_path(path: str | Path) -> Path:
    """Sidecar path of an output file: ``out.csv`` → ``out.meta.json``"""
    path = Path(path)
    return path.with_name(path.stem + METADATA_SUFFIX)


def _point(p: HomPoint) -> list[float]:
    return [float(v) for v in normalize(p).position]


def camera_metadata(cam: CameraModel) -> dict[str, Any]:
    return {
        "P": cam.P.tolist(),
        "image_size": [cam.image_width, cam.image_height],
    }


def kalman_metadata(cfg: KalmanConfig) -> dict[str, Any]:
    return {
        "A": cfg.A.tolist(),
        "Q": cfg.Q.tolist(),
        "R": cfg.R.tolist(),
        "init_cov_scale": float(cfg.init_cov_scale),
    }


def _noise(noise: TransitionNoise) -> dict[str, list[float]]:
    return {
        "x": list(noise.x_range),
        "y": list(noise.y_range),
        "z": list(noise.z_range),
    }


def particle_metadata(cfg: ParticleConfig) -> dict[str, Any]:
    return {
        "particles": cfg.particles,
        "noise": _noise(cfg.noise),
        "init_spread": _noise(cfg.init_spread),
        "resampler": cfg.resampler.name.lower(),
    }


def run_metadata(config: RunConfig) -> dict[str, Any]:
    values: dict[str, Any] = {
        "filter": config.kind.name.lower(),
        "camera": camera_metadata(config.camera),
        "initial_point": _point(config.initial_point),
        "seed": config.seed,
    }
    if config.kalman is not None:
        values["kalman"] = kalman_metadata(config.kalman)
    if config.particle is not None:
        values["particle"] = particle_metadata(config.particle)
    return values


def scenario_metadata(cfg: ScenarioConfig) -> dict[str, Any]:
    return {
        "start": _point(cfg.start),
        "d": float(cfg.d),
        "frames": cfg.frames,
        "pixel_noise_std": float(cfg.pixel_noise_std),
        "seed": cfg.seed,
        "camera": camera_metadata(cfg.camera),
    }


def write_metadata(path: str | Path, values: Mapping[str, Any]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(values, f, indent=2, allow_nan=False)
        f.write("\n")
    logger.info("Wrote run parameters to %s", path)


def write_sidecar(output: str | Path, values: Mapping[str, Any]) -> Path:
    """Write ``values`` next to ``output`` and return the sidecar path"""
    path = metadata_path(output)
    write_metadata(path, values)
    return path


def read_metadata(path: str | Path) -> dict[str, Any]:
    with open(path, encoding="utf-8") as f:
        return json.load(f)
