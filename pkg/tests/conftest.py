import numpy as np
import pytest

from vistrack.geometry import DEFAULT_CAMERA, CameraModel
from vistrack.simulator import preset


@pytest.fixture
def camera() -> CameraModel:
    """f = 500 px, principal point (320, 240), camera at the origin."""
    return DEFAULT_CAMERA


@pytest.fixture
def offset_camera() -> CameraModel:
    """A camera with a rotation and a translation, so ``P`` has a non-zero
    fourth column."""
    angle = np.deg2rad(5.0)
    R = np.array(
        [
            [np.cos(angle), 0.0, np.sin(angle)],
            [0.0, 1.0, 0.0],
            [-np.sin(angle), 0.0, np.cos(angle)],
        ]
    )
    t = np.array([5.0, -3.0, 20.0])
    K = np.array([[480.0, 0.0, 330.0], [0.0, 520.0, 250.0], [0.0, 0.0, 1.0]])
    return CameraModel(K @ np.hstack([R, t[:, None]]))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20100629)


@pytest.fixture(params=["left36", "right30"])
def scenario(request):
    return preset(request.param)
