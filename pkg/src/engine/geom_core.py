"""
Rotation and angular-velocity primitives on SO(3).

Conventions: the world frame is z-up, the body frame is FLU with columns
(c, s, n) = (chord, span to the left, wing normal). R maps body to world.
"""

import logging
import math
from typing import Callable, List, Optional, Tuple

import numpy as np

from ..models.errors import FlightDynamicsError
from ..models.frames import AngularState, Matrix3, Rot3, Vec3Body, Vec3World
from .settings import get_settings


logger = logging.getLogger(__name__)

ORTHONORMAL_TOL = 1e-8
SKEW_TOL = 1e-8
SMALL_ANGLE = 1e-8


class GeometryError(FlightDynamicsError):
    """Exception raised for invalid rotations, triads or skew matrices."""

    def __init__(self, message: str, residual: float = math.nan):
        super().__init__(message)
        self.residual = residual


def cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cross product of two 3-vectors."""
    return np.cross(a, b)


def norm(v: np.ndarray) -> float:
    """Euclidean norm of a 3-vector."""
    return float(np.linalg.norm(v))


def unit(v: np.ndarray) -> np.ndarray:
    """Normalize a nonzero vector."""
    length = norm(v)
    if length == 0.0:
        raise GeometryError("cannot normalize a zero vector")
    return v / length


def hat(v: np.ndarray) -> Matrix3:
    """Skew matrix with hat(v) @ y == v x y."""
    return Matrix3(np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ]))


def vee(M: np.ndarray, tol: Optional[float] = SKEW_TOL) -> np.ndarray:
    """
    Inverse of hat.

    The symmetric part of M must stay below tol * max(1, |M|_F); the
    antisymmetric part is then read off. tol=None skips the check.

    Raises:
        GeometryError: If M is not skew-symmetric within tolerance
    """
    M = np.asarray(M, dtype=float)
    if tol is not None:
        sym = 0.5 * (M + M.T)
        residual = float(np.linalg.norm(sym))
        if residual > tol * max(1.0, float(np.linalg.norm(M))):
            raise GeometryError(
                f"matrix is not skew-symmetric (symmetric part {residual:.3e})", residual
            )
    return np.array([
        0.5 * (M[2, 1] - M[1, 2]),
        0.5 * (M[0, 2] - M[2, 0]),
        0.5 * (M[1, 0] - M[0, 1]),
    ])


def orthonormality_residual(R: np.ndarray) -> float:
    """|R^T R - I| in the Frobenius norm."""
    return float(np.linalg.norm(R.T @ R - np.eye(3)))


def rotation_from_axes(
    c: Vec3World, s: Vec3World, n: Vec3World, tol: float = ORTHONORMAL_TOL
) -> Rot3:
    """
    Assemble R = [c s n] from a right-handed orthonormal triad.

    Args:
        c: Chord axis in world
        s: Span axis in world
        n: Normal axis in world
        tol: Admissible Gram residual and determinant error

    Returns:
        Rotation matrix with the inputs as columns

    Raises:
        GeometryError: If the triad is not orthonormal or is left-handed
    """
    R = np.column_stack((c, s, n)).astype(float)
    residual = orthonormality_residual(R)
    if not math.isfinite(residual) or residual > tol:
        raise GeometryError(f"axes are not orthonormal (Gram residual {residual:.3e})", residual)
    det = float(np.linalg.det(R))
    if abs(det - 1.0) > tol:
        raise GeometryError(f"axes are not right-handed (det {det:.12f})", abs(det - 1.0))
    return Rot3(R)


def reorthonormalize(R: np.ndarray) -> Rot3:
    """Gram-Schmidt on (n, s), then c = s x n."""
    n = unit(R[:, 2])
    s = R[:, 1] - float(R[:, 1] @ n) * n
    s = unit(s)
    c = cross(s, n)
    return Rot3(np.column_stack((c, s, n)))


def omega_from_frame_rates(
    c: Vec3World, s: Vec3World, n: Vec3World,
    c_dot: Vec3World, s_dot: Vec3World, n_dot: Vec3World,
) -> Vec3World:
    """World angular velocity 0.5 * sum(x cross x_dot) of a moving triad."""
    return Vec3World(0.5 * (cross(c, c_dot) + cross(s, s_dot) + cross(n, n_dot)))


def so3_exp(phi: np.ndarray) -> Rot3:
    """Exponential map exp(hat(phi)) in closed form."""
    angle = norm(phi)
    K = hat(phi)
    if angle < SMALL_ANGLE:
        return Rot3(np.eye(3) + K + 0.5 * (K @ K))
    a = math.sin(angle) / angle
    b = (1.0 - math.cos(angle)) / (angle * angle)
    return Rot3(np.eye(3) + a * K + b * (K @ K))


def geodesic_angle(R1: np.ndarray, R2: np.ndarray) -> float:
    """Rotation angle of R1^T R2, accurate near zero."""
    M = R1.T @ R2
    sin_part = norm(vee(M, tol=None))
    cos_part = 0.5 * (float(np.trace(M)) - 1.0)
    return math.atan2(sin_part, cos_part)


def frame_rate_fd(
    sampler: Callable[[float], np.ndarray],
    t: float,
    h: Optional[float] = None,
    h_rate: Optional[float] = None,
    skew_tol: float = 1e-6,
) -> Tuple[Rot3, AngularState]:
    """
    Body rate and its derivative from an attitude sampler.

    omega_B = vee(R^T (R(t+h) - R(t-h)) / 2h); omega_dot_B is the central
    difference of omega_B with step h_rate (default rate_step_factor * h).

    Args:
        sampler: Function t -> R(t)
        t: Evaluation time in s
        h: Step for the attitude difference (default from settings)
        h_rate: Step for the rate difference
        skew_tol: Relative tolerance on the symmetric part of R^T R_dot

    Returns:
        Tuple of (R(t), AngularState)

    Raises:
        GeometryError: If a step is not positive or vanishes next to t
    """
    settings = get_settings()
    h = settings.fd_step if h is None else h
    h_rate = settings.rate_step_factor * h if h_rate is None else h_rate
    for step in (h, h_rate):
        if not step > 0:
            raise GeometryError(f"finite-difference step must be positive, got {step}")
        if (t + step) - t == 0.0 or t - (t - step) == 0.0:
            raise GeometryError(f"step {step:g} is not representable next to t={t:g}")

    def body_rate(tc: float) -> np.ndarray:
        R_c = np.asarray(sampler(tc))
        R_dot = (np.asarray(sampler(tc + h)) - np.asarray(sampler(tc - h))) / (2.0 * h)
        return vee(R_c.T @ R_dot, tol=skew_tol)

    R = Rot3(np.asarray(sampler(t), dtype=float))
    omega = body_rate(t)
    omega_dot = (body_rate(t + h_rate) - body_rate(t - h_rate)) / (2.0 * h_rate)
    return R, AngularState(Vec3Body(omega), Vec3Body(omega_dot))


def sampled_frame_rates(
    times: np.ndarray, rotations: np.ndarray, skew_tol: Optional[float] = 1e-3
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Body rates of a sampled attitude history.

    Second-order differences on the (possibly uneven) time grid, one-sided at
    the ends.

    Args:
        times: Strictly increasing sample times, shape (N,), N >= 3
        rotations: Attitudes, shape (N, 3, 3)
        skew_tol: Relative tolerance on the symmetric part of R^T R_dot

    Returns:
        Tuple of (omega_body, omega_dot_body), each of shape (N, 3)
    """
    times = np.asarray(times, dtype=float)
    if times.shape[0] < 3:
        raise GeometryError("at least 3 samples are needed for sampled rates")
    R_dot = np.gradient(rotations, times, axis=0, edge_order=2)
    omega = np.array([vee(R.T @ Rd, tol=skew_tol) for R, Rd in zip(rotations, R_dot)])
    omega_dot = np.gradient(omega, times, axis=0, edge_order=2)
    return omega, omega_dot


def finite_runs(rotations: np.ndarray) -> List[Tuple[int, int]]:
    """Half-open index ranges [start, stop) of consecutive finite attitudes."""
    finite = np.isfinite(np.asarray(rotations, dtype=float)).all(axis=(1, 2))
    edges = np.diff(np.concatenate(([0], finite.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1)
    return list(zip(starts.tolist(), stops.tolist()))


def segmented_frame_rates(
    times: np.ndarray, rotations: np.ndarray, skew_tol: Optional[float] = 1e-3
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Body rates of an attitude history with gaps.

    Non-finite attitudes split the history; each run of at least 3 finite
    samples is differenced on its own, so a gap never leaks into its
    neighbours. Samples in shorter runs and the gaps themselves get NaN rates.
    A run whose attitudes fail the skew check is retried on the skew part.

    Args:
        times: Strictly increasing sample times, shape (N,)
        rotations: Attitudes, shape (N, 3, 3); NaN marks a missing attitude
        skew_tol: Relative tolerance on the symmetric part of R^T R_dot

    Returns:
        Tuple of (omega_body, omega_dot_body), each of shape (N, 3)
    """
    times = np.asarray(times, dtype=float)
    rotations = np.asarray(rotations, dtype=float)
    omega = np.full((times.shape[0], 3), math.nan)
    omega_dot = np.full((times.shape[0], 3), math.nan)
    for start, stop in finite_runs(rotations):
        if stop - start < 3:
            logger.debug("samples %d..%d: run too short for rates", start, stop - 1)
            continue
        run = slice(start, stop)
        try:
            omega[run], omega_dot[run] = sampled_frame_rates(times[run], rotations[run], skew_tol)
        except GeometryError as exc:
            logger.warning(
                "samples %d..%d are coarse (%s); rates use the skew part only", start, stop - 1, exc
            )
            omega[run], omega_dot[run] = sampled_frame_rates(times[run], rotations[run], skew_tol=None)
    return omega, omega_dot
