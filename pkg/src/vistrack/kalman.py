"""
Kalman filtering of a homogeneous 3D point observed through a pinhole camera.

The state is the 4×1 homogeneous point ``x_t`` with the transition
``x_{t+1} = A x_t + noise(Q)``. Observations are pixels; the update
linearizes the projection around the predicted mean (extended Kalman
filter) and uses the Joseph form for the covariance.

The procedural :func:`linear_predict` and :func:`linear_update` work for any
state and measurement dimension. The ``kf_*`` functions wrap them for the
homogeneous point state.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import numpy.typing as npt
import scipy.linalg

from vistrack.exceptions import SingularMatrixError
from vistrack.geometry import (
    CameraModel,
    HomPoint,
    Mat4,
    Pixel,
    make_transition,
    normalize,
    project,
    projection_jacobian,
)

logger = logging.getLogger(__name__)

_POSITION_MASK = np.diag([1.0, 1.0, 1.0, 0.0])

# Innovation covariances with a larger condition number are treated as singular
_MAX_CONDITION = 1e14


def _symmetric_psd(name: str, M: npt.NDArray[np.float64]) -> None:
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite values")
    scale = max(float(np.max(np.abs(M))), 1.0)
    if not np.allclose(M, M.T, rtol=1e-9, atol=1e-12 * scale):
        raise ValueError(f"{name} is not symmetric")
    if np.min(np.linalg.eigvalsh((M + M.T) / 2)) < -1e-9 * scale:
        raise ValueError(f"{name} is not positive semidefinite")


def _readonly(array: npt.ArrayLike, shape: tuple[int, ...]) -> npt.NDArray[np.float64]:
    result = np.array(array, dtype=np.float64)
    if result.shape != shape:
        raise ValueError(f"Expected shape {shape}, got {result.shape}")
    result.flags.writeable = False
    return result


def _canonical_cov(P: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    # w is deterministic: its row and column carry no uncertainty
    C = (P + P.T) / 2
    C[3, :] = 0.0
    C[:, 3] = 0.0
    return C


@dataclass(frozen=True, eq=False)
class KalmanConfig:
    """
    Model matrices of the filter. Defaults describe the desk experiment: the
    board slides 0.5 cm toward the camera per frame.
    """

    A: Mat4 = field(default_factory=lambda: make_transition(-0.5))
    """Transition matrix, 4×4"""

    Q: npt.NDArray[np.float64] = field(
        default_factory=lambda: np.diag([1.0, 1.0, 1.0, 0.0])
    )
    """Process noise added by every predict (cm²). Fourth row and column are zero"""

    R: npt.NDArray[np.float64] = field(default_factory=lambda: np.diag([4.0, 4.0]))
    """Pixel measurement noise (px²), 2×2"""

    init_cov_scale: float = 150.0
    """
    Variance of the prior on each position axis (cm²). Large, because the
    filter starts away from the true location.
    """

    def __post_init__(self):
        A = _readonly(self.A, (4, 4))
        Q = _readonly(self.Q, (4, 4))
        R = _readonly(self.R, (2, 2))
        if not np.all(np.isfinite(A)):
            raise ValueError("A contains non-finite values")
        _symmetric_psd("Q", Q)
        _symmetric_psd("R", R)
        if np.any(Q[3]) or np.any(Q[:, 3]):
            raise ValueError("Q must have a zero fourth row and column")
        if not np.linalg.cond(R) <= _MAX_CONDITION:
            raise ValueError("R is not invertible")
        if not (np.isfinite(self.init_cov_scale) and self.init_cov_scale >= 0):
            raise ValueError(
                f"init_cov_scale must be finite and non-negative, got {self.init_cov_scale}"
            )
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "R", R)

    @classmethod
    def from_diagonals(
        cls,
        d: float = -0.5,
        process_noise: tuple[float, float, float] = (1.0, 1.0, 1.0),
        measurement_noise: tuple[float, float] = (4.0, 4.0),
        init_cov_scale: float = 150.0,
    ) -> KalmanConfig:
        return cls(
            A=make_transition(d),
            Q=np.diag([*process_noise, 0.0]),
            R=np.diag(measurement_noise),
            init_cov_scale=init_cov_scale,
        )


@dataclass(frozen=True, eq=False)
class GaussianState:
    """
    Gaussian posterior over the homogeneous point.
    """

    mean: HomPoint
    """Mean, canonical (``w = 1``)"""

    cov: npt.NDArray[np.float64]
    """Covariance (cm²), 4×4 with zero fourth row and column"""

    def __post_init__(self):
        object.__setattr__(self, "cov", _readonly(self.cov, (4, 4)))

    @property
    def trace(self) -> float:
        """Trace of the position covariance (cm²)"""
        return float(np.trace(self.cov[:3, :3]))


class LinearUpdate(NamedTuple):
    x: npt.NDArray[np.float64]
    """Posterior mean"""

    P: npt.NDArray[np.float64]
    """Posterior covariance"""

    K: npt.NDArray[np.float64]
    """Kalman gain"""

    S: npt.NDArray[np.float64]
    """Innovation covariance"""


def linear_predict(
    x: npt.ArrayLike,
    P: npt.ArrayLike,
    A: npt.ArrayLike,
    Q: npt.ArrayLike,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """
    Propagate a Gaussian through a linear transition: ``x' = A x`` and
    ``P' = A P Aᵀ + Q``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    P = np.atleast_2d(np.asarray(P, dtype=np.float64))
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    return A @ x, A @ P @ A.T + np.atleast_2d(Q)


def linear_update(
    x: npt.ArrayLike,
    P: npt.ArrayLike,
    innovation: npt.ArrayLike,
    H: npt.ArrayLike,
    R: npt.ArrayLike,
) -> LinearUpdate:
    """
    Condition a Gaussian on a measurement with the given innovation
    (measurement minus predicted measurement) and measurement matrix ``H``.

    The covariance is updated in Joseph form,
    ``(I - KH) P (I - KH)ᵀ + K R Kᵀ``, which stays symmetric positive
    semidefinite for any gain.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    P = np.atleast_2d(np.asarray(P, dtype=np.float64))
    H = np.atleast_2d(np.asarray(H, dtype=np.float64))
    R = np.atleast_2d(np.asarray(R, dtype=np.float64))
    y = np.atleast_1d(np.asarray(innovation, dtype=np.float64))

    PHT = P @ H.T
    S = H @ PHT + R
    if not np.all(np.isfinite(S)) or not np.linalg.cond(S) <= _MAX_CONDITION:
        raise SingularMatrixError(f"Innovation covariance is singular:\n{S}")
    try:
        K = scipy.linalg.solve(S, PHT.T, assume_a="sym").T
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise SingularMatrixError(str(e)) from e

    I_KH = np.eye(P.shape[0]) - K @ H
    P = I_KH @ P @ I_KH.T + K @ R @ K.T
    return LinearUpdate(x + K @ y, P, K, S)


def kf_init(x0: HomPoint, cfg: KalmanConfig) -> GaussianState:
    """
    Prior centered on ``x0`` with variance ``cfg.init_cov_scale`` on each
    position axis.
    """
    return GaussianState(normalize(x0), cfg.init_cov_scale * _POSITION_MASK)


def kf_predict(s: GaussianState, cfg: KalmanConfig) -> GaussianState:
    x, P = linear_predict(s.mean.as_array(), s.cov, cfg.A, cfg.Q)
    return GaussianState(normalize(HomPoint.from_array(x)), _canonical_cov(P))


def kf_update(
    s: GaussianState,
    z: Pixel,
    cam: CameraModel,
    cfg: KalmanConfig,
) -> GaussianState:
    """
    Condition the state on one pixel observation. The innovation is computed
    in pixel space and the projection is linearized at the current mean.
    """
    predicted = project(cam, s.mean)
    innovation = np.array([z[0] - predicted.u, z[1] - predicted.v])
    J = projection_jacobian(cam, s.mean)

    result = linear_update(s.mean.as_array(), s.cov, innovation, J, cfg.R)
    state = GaussianState(
        normalize(HomPoint.from_array(result.x)),
        _canonical_cov(result.P),
    )
    logger.debug(
        "update: innovation=%.4g px, trace=%.4g cm²",
        float(np.hypot(*innovation)),
        state.trace,
    )
    return state


def kf_step(
    s: GaussianState,
    z: Pixel,
    cam: CameraModel,
    cfg: KalmanConfig,
) -> GaussianState:
    return kf_update(kf_predict(s, cfg), z, cam, cfg)


def reprojection_error(cam: CameraModel, point: HomPoint, pixel: Pixel) -> float:
    """Pixel distance between an observation and the projection of ``point``"""
    p = project(cam, point)
    return float(np.hypot(pixel[0] - p.u, pixel[1] - p.v))
