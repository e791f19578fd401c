"""
Homogeneous points, the constant-velocity transition and the pinhole camera.

World axes are camera-centered: the optical axis is ``+z`` and motion toward
the camera decreases ``z``. Matrix entries are written 1-based in prose, as
in "the (3,4) entry", and stored row-major.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, TypeAlias

import numpy as np
import numpy.typing as npt

from vistrack.exceptions import DegeneratePointError, PointBehindCameraError

Mat4: TypeAlias = npt.NDArray[np.float64]
"""A 4×4 ``float64`` matrix"""


def _frozen(array: npt.ArrayLike, shape: tuple[int, ...]) -> npt.NDArray[np.float64]:
    result = np.array(array, dtype=np.float64)
    if result.shape != shape:
        raise ValueError(f"Expected shape {shape}, got {result.shape}")
    result.flags.writeable = False
    return result


@dataclass(frozen=True)
class HomPoint:
    """
    A 3D point in homogeneous coordinates. ``(x, y, z, w)`` denotes the
    Euclidean point ``(x/w, y/w, z/w)``.
    """

    x: float
    """X coordinate (cm), positive to the right of the optical axis"""

    y: float
    """Y coordinate (cm)"""

    z: float
    """Z coordinate (cm), distance along the optical axis"""

    w: float = 1.0
    """Homogeneous scale. Canonical points have ``w = 1``"""

    def __post_init__(self):
        if self.w == 0:
            raise DegeneratePointError(
                f"Homogeneous point ({self.x}, {self.y}, {self.z}) has w = 0"
            )
        for name in ("x", "y", "z", "w"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def from_array(cls, values: npt.ArrayLike) -> HomPoint:
        """
        Build a point from 4 homogeneous components, or from 3 Euclidean
        components (``w`` is then 1).
        """
        a = np.asarray(values, dtype=np.float64).ravel()
        if a.shape == (3,):
            return cls(float(a[0]), float(a[1]), float(a[2]))
        if a.shape == (4,):
            return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))
        raise ValueError(f"Expected 3 or 4 components, got {a.shape[0]}")

    def as_array(self) -> npt.NDArray[np.float64]:
        return np.array([self.x, self.y, self.z, self.w], dtype=np.float64)

    @property
    def position(self) -> npt.NDArray[np.float64]:
        """Euclidean position ``(x/w, y/w, z/w)``"""
        return np.array(
            [self.x / self.w, self.y / self.w, self.z / self.w], dtype=np.float64
        )

    @property
    def is_canonical(self) -> bool:
        return self.w == 1.0

    def scaled(self, s: float) -> HomPoint:
        """
        Multiply every component by ``s``. The result denotes the same
        Euclidean point.
        """
        return HomPoint(s * self.x, s * self.y, s * self.z, s * self.w)


class Pixel(NamedTuple):
    u: float
    """Horizontal image coordinate (px)"""

    v: float
    """Vertical image coordinate (px)"""


class Intrinsics(NamedTuple):
    f: float
    """Focal length (px)"""

    cx: float
    """Principal point, horizontal (px)"""

    cy: float
    """Principal point, vertical (px)"""


@dataclass(frozen=True, eq=False)
class CameraModel:
    """
    Pinhole camera described by a 3×4 projection matrix. A point ``p`` maps
    to ``h = P·p`` and then to the pixel ``(h1/h3, h2/h3)``.
    """

    P: npt.NDArray[np.float64]
    """Projection matrix, 3×4"""

    image_width: int = 640
    """Image width (px). Informational only"""

    image_height: int = 480
    """Image height (px). Informational only"""

    def __post_init__(self):
        P = _frozen(self.P, (3, 4))
        if not np.all(np.isfinite(P)):
            raise ValueError("Projection matrix contains non-finite values")
        if not np.any(P[2]):
            raise ValueError("Third row of the projection matrix is all zero")
        object.__setattr__(self, "P", P)

    @classmethod
    def from_intrinsics(
        cls,
        f: float,
        cx: float,
        cy: float,
        width: int = 640,
        height: int = 480,
    ) -> CameraModel:
        """
        Camera at the world origin looking along ``+z``, with
        ``P = [[f,0,cx,0],[0,f,cy,0],[0,0,1,0]]``.
        """
        P = [
            [f, 0.0, cx, 0.0],
            [0.0, f, cy, 0.0],
            [0.0, 0.0, 1.0, 0.0],
        ]
        return cls(P=P, image_width=width, image_height=height)

    @property
    def intrinsics(self) -> Intrinsics | None:
        """
        Focal length and principal point, or ``None`` when ``P`` is not of
        the form produced by :meth:`from_intrinsics`.
        """
        f, cx, cy = self.P[0, 0], self.P[0, 2], self.P[1, 2]
        if np.array_equal(self.P, CameraModel.from_intrinsics(f, cx, cy).P):
            return Intrinsics(float(f), float(cx), float(cy))
        return None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CameraModel):
            return NotImplemented
        return (
            np.array_equal(self.P, other.P)
            and self.image_width == other.image_width
            and self.image_height == other.image_height
        )

    def __hash__(self) -> int:
        return hash((self.P.tobytes(), self.image_width, self.image_height))


DEFAULT_CAMERA = CameraModel.from_intrinsics(500.0, 320.0, 240.0)
"""f = 500 px, principal point (320, 240), 640×480 image"""


@dataclass(frozen=True)
class BoardSpec:
    """
    A virtual chessboard: a grid of corner points on a plane facing the
    camera.
    """

    center: HomPoint
    """Board center (cm)"""

    square_size: float
    """Distance between neighbouring corners (cm)"""

    rows: int = 3
    """Number of corner rows"""

    cols: int = 3
    """Number of corner columns"""

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"Board needs at least one corner, got {self.rows}×{self.cols}")
        if not self.square_size > 0:
            raise ValueError(f"Square size must be positive, got {self.square_size}")


def normalize(p: HomPoint) -> HomPoint:
    """
    Return the canonical form ``(x/w, y/w, z/w, 1)`` of ``p``.
    """
    if p.w == 0:
        raise DegeneratePointError("Cannot normalize a point with w = 0")
    if p.w == 1.0:
        return p
    return HomPoint(p.x / p.w, p.y / p.w, p.z / p.w, 1.0)


def displace(p: HomPoint, dx: float = 0.0, dy: float = 0.0, dz: float = 0.0) -> HomPoint:
    """
    Move ``p`` by a Euclidean offset (cm). The result is canonical.
    """
    q = normalize(p)
    return HomPoint(q.x + dx, q.y + dy, q.z + dz)


def make_transition(d: float) -> Mat4:
    """
    Constant-velocity transition along the optical axis: the identity with
    the (3,4) entry set to ``d`` (cm per frame).
    """
    A = np.eye(4, dtype=np.float64)
    A[2, 3] = d
    A.flags.writeable = False
    return A


def apply_transition(A: Mat4, p: HomPoint) -> HomPoint:
    return HomPoint.from_array(np.asarray(A, dtype=np.float64) @ p.as_array())


def depth(cam: CameraModel, p: HomPoint) -> float:
    """
    Projective depth of ``p``: the third component of ``P·normalize(p)``.
    Points with non-positive depth cannot be projected.
    """
    return float(cam.P[2] @ normalize(p).as_array())


def project(cam: CameraModel, p: HomPoint) -> Pixel:
    h = cam.P @ normalize(p).as_array()
    if not h[2] > 0:
        raise PointBehindCameraError(
            f"Point ({p.x}, {p.y}, {p.z}, {p.w}) has depth {h[2]}"
        )
    return Pixel(float(h[0] / h[2]), float(h[1] / h[2]))


def project_many(
    cam: CameraModel, points: npt.ArrayLike
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """
    Project an ``(N, 3)`` array of Euclidean positions, or an ``(N, 4)``
    array of homogeneous points.

    Returns pixels ``(N, 2)`` and depths ``(N,)``. Pixels of points with
    non-positive depth are NaN; nothing is raised.
    """
    a = np.asarray(points, dtype=np.float64)
    if a.ndim != 2 or a.shape[1] not in (3, 4):
        raise ValueError(f"Expected an (N, 3) or (N, 4) array, got {a.shape}")
    if a.shape[1] == 3:
        a = np.hstack([a, np.ones((a.shape[0], 1))])
    else:
        if np.any(a[:, 3] == 0):
            raise DegeneratePointError("Cannot project points with w = 0")
        a = a / a[:, 3:4]

    h = a @ cam.P.T
    depths = h[:, 2]
    pixels = np.full((a.shape[0], 2), np.nan)
    visible = depths > 0
    pixels[visible] = h[visible, :2] / depths[visible, None]
    return pixels, depths


def projection_jacobian(cam: CameraModel, p: HomPoint) -> npt.NDArray[np.float64]:
    """
    Derivative of :func:`project` with respect to the homogeneous components
    ``(x, y, z, w)`` of ``p``, evaluated at ``p``. Shape 2×4.

    With ``h = P·p``, row ``i`` is ``(P_i·h3 - h_i·P_3) / h3²``.
    """
    if not depth(cam, p) > 0:
        raise PointBehindCameraError(
            f"Point ({p.x}, {p.y}, {p.z}, {p.w}) is behind the camera"
        )
    P = cam.P
    h = P @ p.as_array()
    return (P[:2] * h[2] - np.outer(h[:2], P[2])) / h[2] ** 2


def board_corners(spec: BoardSpec) -> list[HomPoint]:
    """
    Corner points of a virtual board, row-major, on the plane
    ``z = center.z``. For odd grids the middle corner is the center.
    """
    c = normalize(spec.center)
    corners: list[HomPoint] = []
    for i in range(spec.rows):
        dy = (i - (spec.rows - 1) / 2) * spec.square_size
        for j in range(spec.cols):
            dx = (j - (spec.cols - 1) / 2) * spec.square_size
            corners.append(HomPoint(c.x + dx, c.y + dy, c.z))
    return corners
