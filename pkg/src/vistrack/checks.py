import logging

import numpy as np

from vistrack.kalman import GaussianState
from vistrack.particles import ParticleSet

logger = logging.getLogger(__name__)


def check_gaussian_state(state: GaussianState, tolerance: float = 1e-9) -> bool:
    """
    Check that a Kalman state is well formed: canonical mean, symmetric
    covariance that is positive semidefinite on the position block, and a
    zero ``w`` row and column.
    """
    ok = True
    cov = state.cov
    scale = max(float(np.trace(cov[:3, :3])), 1.0)

    if state.mean.w != 1.0:
        ok = False
        logger.warning("Mean %s is not canonical", state.mean)

    if not np.all(np.isfinite(cov)):
        logger.warning("Covariance contains non-finite values")
        return False

    asymmetry = float(np.max(np.abs(cov - cov.T)))
    if asymmetry > tolerance * scale:
        ok = False
        logger.warning("Covariance is not symmetric (max difference %g)", asymmetry)

    smallest = float(np.min(np.linalg.eigvalsh(cov[:3, :3])))
    if smallest < -tolerance * scale:
        ok = False
        logger.warning(
            "Position covariance is not positive semidefinite "
            "(smallest eigenvalue %g)",
            smallest,
        )

    if np.any(np.diag(cov) < 0):
        ok = False
        logger.warning("Covariance has negative variances: %s", np.diag(cov))

    if np.any(cov[3]) or np.any(cov[:, 3]):
        ok = False
        logger.warning("Covariance has a non-zero w row or column")

    return ok


def check_particle_set(s: ParticleSet, tolerance: float = 1e-12) -> bool:
    """
    Check that particle weights are non-negative and sum to one, and that
    every position is finite.
    """
    ok = True

    if np.any(s.weights < 0):
        ok = False
        logger.warning("%d particles have negative weight", int(np.sum(s.weights < 0)))

    total = float(np.sum(s.weights))
    if abs(total - 1.0) > tolerance:
        ok = False
        logger.warning("Particle weights sum to %r, not 1", total)

    if not np.all(np.isfinite(s.points)):
        ok = False
        logger.warning("Particle set contains non-finite positions")

    return ok
