from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from vistrack.exceptions import FrameMismatchError
from vistrack.geometry import CameraModel, project
from vistrack.kalman import reprojection_error
from vistrack.tracks import EstimateRecord, GroundTruthTrack, estimates_array

_AXES = ("x", "y", "z")


@dataclass(frozen=True)
class Metrics:
    """
    Tracking accuracy of an estimate track against the ground truth.
    Distances are in cm, per axis ``(x, y, z)``.
    """

    frames: int
    tail: int

    rmse: tuple[float, float, float]
    """Root mean square error over all frames"""

    tail_mae: tuple[float, float, float]
    """Mean absolute error over the last ``tail`` frames"""

    final_abs: tuple[float, float, float]
    """Absolute error at the last frame"""

    reproj_final: float | None = None
    """
    Pixel distance between the projections of the final estimate and the
    final true position. Only available when a camera is given.
    """

    def as_dict(self) -> dict[str, float | int]:
        result: dict[str, float | int] = {"frames": self.frames, "tail": self.tail}
        for name in ("rmse", "tail_mae", "final_abs"):
            for axis, value in zip(_AXES, getattr(self, name)):
                result[f"{name}_{axis}"] = value
        if self.reproj_final is not None:
            result["reproj_final"] = self.reproj_final
        return result

    def as_lines(self) -> list[str]:
        """``key=value`` lines, in a fixed order"""
        return [f"{key}={value!r}" for key, value in self.as_dict().items()]


def evaluate(
    est: Sequence[EstimateRecord],
    truth: GroundTruthTrack,
    tail: int,
    camera: CameraModel | None = None,
) -> Metrics:
    """
    Compare estimates with the ground truth, frame by frame.
    """
    est_frames = [e.frame for e in est]
    if est_frames != truth.frames:
        raise FrameMismatchError(
            f"Estimates cover {len(est_frames)} frames, truth covers "
            f"{len(truth)}; frame numbers must match one to one"
        )
    n = len(truth)
    if not 1 <= tail <= n:
        raise ValueError(f"Tail must be between 1 and {n}, got {tail}")

    errors = estimates_array(est) - truth.as_array()
    rmse = np.sqrt(np.mean(errors**2, axis=0))
    tail_mae = np.mean(np.abs(errors[-tail:]), axis=0)
    final_abs = np.abs(errors[-1])

    reproj = None
    if camera is not None:
        reproj = reprojection_error(
            camera, est[-1].point, project(camera, truth[-1].point)
        )

    return Metrics(
        frames=n,
        tail=tail,
        rmse=tuple(float(v) for v in rmse),
        tail_mae=tuple(float(v) for v in tail_mae),
        final_abs=tuple(float(v) for v in final_abs),
        reproj_final=reproj,
    )

