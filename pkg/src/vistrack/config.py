"""
Run configuration: which filter to run and with which parameters.

The configuration file is a flat JSON object. Every key is optional and
unknown keys are rejected. A single file may carry settings for both filters;
:func:`load_run_config` keeps those of the requested filter only.
"""

from __future__ import annotations

import json
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum, auto
from pathlib import Path
from typing import Any

from vistrack.exceptions import ConfigError
from vistrack.geometry import DEFAULT_CAMERA, CameraModel, HomPoint
from vistrack.kalman import KalmanConfig
from vistrack.particles import Resampler, TransitionNoise
from vistrack.simulator import MID_END_POINT


class FilterKind(Enum):
    EKF = auto()
    """Extended Kalman filter"""

    PF = auto()
    """Particle filter"""

    @classmethod
    def parse(cls, name: str) -> FilterKind:
        try:
            return cls[name.upper()]
        except KeyError:
            raise ConfigError(
                f"Unknown filter '{name}'. Choose one of: ekf, pf"
            ) from None


@dataclass(frozen=True)
class ParticleConfig:
    particles: int = 1000
    """Number of particles"""

    noise: TransitionNoise = field(default_factory=TransitionNoise)
    """Uniform displacement added on each predict"""

    init_spread: TransitionNoise = field(
        default_factory=lambda: TransitionNoise(
            x_range=(-40.0, 40.0), y_range=(0.0, 0.0), z_range=(0.0, 0.0)
        )
    )
    """Box around the initial point from which particles are first drawn"""

    resampler: Resampler = Resampler.SYSTEMATIC

    def __post_init__(self):
        if self.particles < 1:
            raise ValueError(f"Particle count must be at least 1, got {self.particles}")


@dataclass(frozen=True)
class RunConfig:
    """
    Everything needed to run one filter over an observation track.
    """

    kind: FilterKind

    camera: CameraModel = DEFAULT_CAMERA

    initial_point: HomPoint = MID_END_POINT
    """Starting estimate (cm)"""

    seed: int = 0
    """Seed of the particle filter's generator"""

    kalman: KalmanConfig | None = None
    """Kalman settings. Set when, and only when, ``kind`` is EKF"""

    particle: ParticleConfig | None = None
    """Particle settings. Set when, and only when, ``kind`` is PF"""

    def __post_init__(self):
        if (self.kalman is None) == (self.particle is None):
            raise ValueError("Exactly one of kalman or particle must be set")
        if self.kind is FilterKind.EKF and self.kalman is None:
            raise ValueError("EKF run without Kalman settings")
        if self.kind is FilterKind.PF and self.particle is None:
            raise ValueError("PF run without particle settings")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"Seed must be a 64-bit unsigned integer, got {self.seed}")


_COMMON_KEYS = {"camera", "image_size", "initial_point", "seed"}
_EKF_KEYS = {"d", "process_noise", "measurement_noise", "init_cov_scale"}
_PF_KEYS = {
    "particles",
    "noise_x",
    "noise_y",
    "noise_z",
    "init_spread_x",
    "init_spread_y",
    "init_spread_z",
    "resampler",
}
KNOWN_KEYS = _COMMON_KEYS | _EKF_KEYS | _PF_KEYS


def _number(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{key}: expected a finite number, got {value!r}")
    return float(value)


def _integer(key: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    return value


def _numbers(key: str, value: Any, length: int) -> tuple[float, ...]:
    if not isinstance(value, list) or len(value) != length:
        raise ConfigError(f"{key}: expected a list of {length} numbers, got {value!r}")
    return tuple(_number(key, v) for v in value)


def camera_from_values(
    intrinsics: tuple[float, ...],
    image_size: tuple[float, ...] = (640, 480),
) -> CameraModel:
    f, cx, cy = intrinsics
    return CameraModel.from_intrinsics(
        f, cx, cy, width=int(image_size[0]), height=int(image_size[1])
    )


def parse_run_config(values: Mapping[str, Any], kind: FilterKind) -> RunConfig:
    """
    Build a :class:`RunConfig` from the decoded JSON object.
    """
    unknown = sorted(set(values) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"Unknown configuration keys: {', '.join(unknown)}")

    try:
        camera = DEFAULT_CAMERA
        if "camera" in values or "image_size" in values:
            intrinsics = DEFAULT_CAMERA.intrinsics
            if "camera" in values:
                intrinsics = _numbers("camera", values["camera"], 3)
            size = (640, 480)
            if "image_size" in values:
                size = _numbers("image_size", values["image_size"], 2)
            camera = camera_from_values(intrinsics, size)

        initial_point = MID_END_POINT
        if "initial_point" in values:
            initial_point = HomPoint(*_numbers("initial_point", values["initial_point"], 3))

        seed = _integer("seed", values.get("seed", 0))

        kalman = None
        particle = None
        if kind is FilterKind.EKF:
            kalman = KalmanConfig.from_diagonals(
                d=_number("d", values.get("d", -0.5)),
                process_noise=_numbers(
                    "process_noise", values.get("process_noise", [1, 1, 1]), 3
                ),
                measurement_noise=_numbers(
                    "measurement_noise", values.get("measurement_noise", [4, 4]), 2
                ),
                init_cov_scale=_number(
                    "init_cov_scale", values.get("init_cov_scale", 150)
                ),
            )
        else:
            resampler_name = values.get("resampler", "systematic")
            try:
                resampler = Resampler[str(resampler_name).upper()]
            except KeyError:
                raise ConfigError(
                    f"resampler: expected 'systematic' or 'multinomial', "
                    f"got {resampler_name!r}"
                ) from None
            particle = ParticleConfig(
                particles=_integer("particles", values.get("particles", 1000)),
                noise=TransitionNoise(
                    x_range=_numbers("noise_x", values.get("noise_x", [-40, 40]), 2),
                    y_range=_numbers("noise_y", values.get("noise_y", [0, 0]), 2),
                    z_range=_numbers("noise_z", values.get("noise_z", [-1.0, -0.1]), 2),
                ),
                init_spread=TransitionNoise(
                    x_range=_numbers(
                        "init_spread_x", values.get("init_spread_x", [-40, 40]), 2
                    ),
                    y_range=_numbers(
                        "init_spread_y", values.get("init_spread_y", [0, 0]), 2
                    ),
                    z_range=_numbers(
                        "init_spread_z", values.get("init_spread_z", [0, 0]), 2
                    ),
                ),
                resampler=resampler,
            )

        return RunConfig(
            kind=kind,
            camera=camera,
            initial_point=initial_point,
            seed=seed,
            kalman=kalman,
            particle=particle,
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e


def load_run_config(path: str | Path, kind: FilterKind) -> RunConfig:
    with open(path, "rb") as f:
        data = f.read()
    try:
        values = json.loads(data.decode("utf-8"))
    except UnicodeDecodeError as e:
        line = data.count(b"\n", 0, e.start) + 1
        raise ConfigError(f"{path}:{line}: not valid UTF-8 text") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}: invalid JSON: {e.msg}") from e
    if not isinstance(values, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return parse_run_config(values, kind)
