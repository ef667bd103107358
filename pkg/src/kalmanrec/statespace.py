"""Constant-acceleration state-space model over the genre-interest space.

A user is modeled as a point moving through a d-dimensional space whose axes
are content genres.  The tracked state stacks position, velocity and
acceleration blocks, giving a 3d-dimensional vector laid out as
``[positions; velocities; accelerations]``.  The dynamics are

    X[k+1] = A X[k] + w[k],    w ~ N(0, Q)
    Z[k]   = H X[k] + v[k],    v ~ N(0, R)

where A applies the kinematic update with a diagonal decay ``alpha`` and a
mean inter-observation interval ``t_step``, and H selects the position block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg


@dataclass(frozen=True)
class ModelParams:
    """Scalar parameters that fully determine the model matrices.

    Attributes
    ----------
    d : int
        Dimension of the genre space (number of tracked interest components).
    alpha : float
        Diagonal decay applied to every state block per step.  1.0 gives the
        pure kinematic model; values below 1 damp the state.
    t_step : float
        Mean time interval between observations, in abstract units.
    q : float
        Process noise variance scale; Q = q * I.
    r : float
        Measurement noise variance scale; R = r * I.  Must be positive so the
        innovation covariance stays positive definite.
    p0 : float
        Initial state covariance scale; P0 = p0 * I.
    include_process_noise_in_riccati : bool
        When True (default) the covariance recursion adds Q each step, the
        standard prediction-form Riccati update.  When False the recursion
        omits Q, which drives the covariance, and with it the gain, to zero.
    """

    d: int
    alpha: float = 1.0
    t_step: float = 1.0
    q: float = 1e-3
    r: float = 1e-2
    p0: float = 1.0
    include_process_noise_in_riccati: bool = True

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.t_step <= 0:
            raise ValueError("t_step must be > 0")
        if self.q < 0:
            raise ValueError("q must be >= 0")
        if self.r <= 0:
            raise ValueError("r must be > 0")
        if self.p0 <= 0:
            raise ValueError("p0 must be > 0")

    @property
    def state_dim(self) -> int:
        return 3 * self.d


@dataclass(frozen=True)
class ModelMatrices:
    """Assembled system matrices: A (3d x 3d), H (d x 3d), Q (3d x 3d), R (d x d)."""

    A: np.ndarray
    H: np.ndarray
    Q: np.ndarray
    R: np.ndarray


@dataclass(frozen=True)
class StateEstimate:
    """One-step-ahead state prediction and its covariance at step ``k``.

    ``x_hat`` is the 3d-dimensional predicted state; ``P`` its 3d x 3d
    covariance, kept symmetric by the filter after every update.
    """

    x_hat: np.ndarray
    P: np.ndarray
    k: int = 0


def assemble(params: ModelParams) -> ModelMatrices:
    """Build A, H, Q, R from the scalar parameters.

    A is the 3x3 block tiling [[aI, TI, T^2/2 I], [0, aI, TI], [0, 0, aI]]
    with d x d blocks; H = [I | 0 | 0] selects the position block.
    Identical params give bit-identical matrices.
    """
    d = params.d
    eye = linalg.identity(d)
    zero = linalg.zeros(d, d)
    a_eye = linalg.scale(eye, params.alpha)
    t_eye = linalg.scale(eye, params.t_step)
    half_t2_eye = linalg.scale(eye, 0.5 * params.t_step ** 2)
    A = linalg.block3x3(
        [a_eye, t_eye, half_t2_eye,
         zero, a_eye, t_eye,
         zero, zero, a_eye]
    )
    H = np.hstack([eye, linalg.zeros(d, 2 * d)])
    Q = linalg.scale(linalg.identity(3 * d), params.q)
    R = linalg.scale(linalg.identity(d), params.r)
    return ModelMatrices(A=A, H=H, Q=Q, R=R)


def initial_estimate(params: ModelParams, first_measurement) -> StateEstimate:
    """Initial prediction from the first observed position.

    The position block is set to the measurement; velocity and acceleration
    start at zero; P0 = p0 * I over the full state.
    """
    z = linalg.as_vector(first_measurement)
    if z.shape[0] != params.d:
        raise ValueError(
            f"first measurement has dimension {z.shape[0]}, expected {params.d}"
        )
    x_hat = np.concatenate([z, np.zeros(2 * params.d)])
    P = linalg.scale(linalg.identity(params.state_dim), params.p0)
    return StateEstimate(x_hat=x_hat, P=P, k=0)
