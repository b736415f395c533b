"""
Aerodynamic directions, angles, coefficient maps and loads.

All body-frame quantities use FLU axes: c = e1 (forward), s = e2 (left),
n = e3 (up). Moment coefficients therefore carry the opposite sign for pitch
and yaw compared with FRD tables.
"""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from ..models.aircraft import (
    AeroDirections,
    AeroPolar,
    AirState,
    LiftingSurface,
)
from ..models.errors import FlightDynamicsError
from ..models.frames import E3, Rot3, Vec3Body, Vec3World
from .geom_core import cross, norm
from .settings import get_settings


logger = logging.getLogger(__name__)

LIFT_PROJECTION_TOL = 1e-9


class AeroModelError(FlightDynamicsError):
    """Exception raised for invalid aerodynamic inputs."""
    pass


class DegenerateLiftError(AeroModelError):
    """Exception raised when the flow is parallel to the wing normal."""

    def __init__(self, message: str, surface_index: Optional[int] = None):
        super().__init__(message)
        self.surface_index = surface_index


# =============================================================================
# Air-relative state
# =============================================================================

def air_state(
    v_world: Vec3World,
    w_world: Vec3World,
    R: Rot3,
    rho: float,
    eps: Optional[float] = None,
) -> AirState:
    """
    Air-relative velocity, flow direction and dynamic pressure.

    Below the airspeed floor eps the regularized speed max(|v_a|, eps) is used
    for both the flow direction and the dynamic pressure.

    Args:
        v_world: Inertial velocity in m/s
        w_world: Wind velocity in m/s
        R: Body-to-world rotation
        rho: Air density in kg/m^3
        eps: Airspeed floor in m/s (default from settings)

    Returns:
        AirState
    """
    eps = get_settings().eps_airspeed if eps is None else eps
    if not eps > 0:
        raise AeroModelError(f"airspeed floor must be positive, got {eps}")

    v_a_world = np.asarray(v_world, dtype=float) - np.asarray(w_world, dtype=float)
    speed = norm(v_a_world)
    regularized = speed < eps
    speed_eps = eps if regularized else speed
    e_a_world = v_a_world / speed_eps
    if regularized:
        logger.debug("airspeed %.3g m/s below floor %.3g m/s, regularized", speed, eps)

    return AirState(
        v_a_world=Vec3World(v_a_world),
        v_a_body=Vec3Body(R.T @ v_a_world),
        e_a_world=Vec3World(e_a_world),
        e_a_body=Vec3Body(R.T @ e_a_world),
        speed=speed,
        q=0.5 * rho * speed_eps * speed_eps,
        regularized=regularized,
    )


def aero_directions(e_a_body: Vec3Body, n_body: Vec3Body = E3) -> AeroDirections:
    """
    Drag, side and lift directions for a given flow.

    e_D = -e_a, e_L is the normalized projection of the wing normal onto the
    plane orthogonal to the flow, e_Y = e_a x e_L.

    Raises:
        DegenerateLiftError: If the flow is parallel to the wing normal
    """
    flow_len = norm(e_a_body)
    if flow_len == 0.0:
        raise DegenerateLiftError("zero flow vector has no lift direction")
    e_a = e_a_body / flow_len
    projection = n_body - float(n_body @ e_a) * e_a
    proj_len = norm(projection)
    if proj_len <= LIFT_PROJECTION_TOL:
        raise DegenerateLiftError(
            f"flow is parallel to the wing normal (projection {proj_len:.2e})"
        )
    e_L = projection / proj_len
    return AeroDirections(
        e_D=Vec3Body(-e_a),
        e_Y=Vec3Body(cross(e_a, e_L)),
        e_L=Vec3Body(e_L),
    )


def angle_of_attack(e_a_body: Vec3Body) -> float:
    """alpha = atan2(-e_a.n, e_a.c); flow from below the chord gives alpha > 0."""
    return math.atan2(-e_a_body[2], e_a_body[0])


def sideslip(e_a_body: Vec3Body) -> float:
    """Signed angle between the flow and the sagittal plane; positive to starboard."""
    lateral = float(e_a_body[1])
    return math.atan2(-lateral, math.sqrt(max(0.0, 1.0 - lateral * lateral)))


def flow_from_angles(alpha: float, beta: float) -> Vec3Body:
    """Unit flow direction with the given angle of attack and sideslip."""
    return Vec3Body(np.array([
        math.cos(alpha) * math.cos(beta),
        -math.sin(beta),
        -math.sin(alpha) * math.cos(beta),
    ]))


# =============================================================================
# Coefficients
# =============================================================================

def polar_eval(polar: AeroPolar, alpha: float) -> Tuple[float, float]:
    """Return (C_L, C_D) at alpha."""
    return polar.lift(alpha), polar.drag(alpha)


def drag_from_lift_coefficient(polar: AeroPolar, C_L: float) -> float:
    """Parabolic polar in lift-coefficient form, C_D0 + k C_L^2."""
    return polar.C_D0 + polar.k * C_L * C_L


def finite_wing_lift_slope(a0: float, aspect_ratio: float, oswald: float) -> float:
    """Finite-wing lift slope a0 / (1 + a0 / (pi e AR))."""
    _check_wing(aspect_ratio, oswald)
    if not a0 > 0:
        raise AeroModelError(f"section lift slope must be positive, got {a0}")
    return a0 / (1.0 + a0 / (math.pi * oswald * aspect_ratio))


def induced_factor(aspect_ratio: float, oswald: float) -> float:
    """Induced-drag factor k = 1 / (pi e AR)."""
    _check_wing(aspect_ratio, oswald)
    return 1.0 / (math.pi * oswald * aspect_ratio)


def k_alpha_of(k: float, a: float) -> float:
    """Induced-drag factor per alpha^2, k * a^2."""
    return k * a * a


def aspect_ratio(b: float, S: float) -> float:
    """AR = b^2 / S."""
    if not (b > 0 and S > 0):
        raise AeroModelError(f"span and area must be positive, got b={b}, S={S}")
    return b * b / S


def polar_from_wing(
    a0: float, aspect_ratio: float, oswald: float, C_D0: float
) -> AeroPolar:
    """Small-angle polar with slope and induced drag derived from the wing."""
    a = finite_wing_lift_slope(a0, aspect_ratio, oswald)
    k = induced_factor(aspect_ratio, oswald)
    return AeroPolar(a=a, C_D0=C_D0, k=k, k_alpha=k_alpha_of(k, a))


def _check_wing(aspect_ratio: float, oswald: float) -> None:
    if not aspect_ratio > 0:
        raise AeroModelError(f"aspect ratio must be positive, got {aspect_ratio}")
    if not 0 < oswald <= 1:
        raise AeroModelError(f"Oswald efficiency must lie in (0, 1], got {oswald}")


def frd_moment_coefficients(coefficients: Sequence[float]) -> np.ndarray:
    """Convert (C_l, C_m, C_n) from FLU to FRD sign conventions."""
    C_l, C_m, C_n = coefficients
    return np.array([C_l, -C_m, -C_n])


# =============================================================================
# Loads
# =============================================================================

def aero_force_body(
    q: float, S: float, C_D: float, C_L: float, C_Y: float, dirs: AeroDirections
) -> Vec3Body:
    """qS (C_D e_D + C_L e_L + C_Y e_Y)."""
    qS = q * S
    return Vec3Body(qS * (C_D * dirs.e_D + C_L * dirs.e_L + C_Y * dirs.e_Y))


def aero_force_world(R: Rot3, force_body: Vec3Body) -> Vec3World:
    """Map a body-frame force to the world frame."""
    return Vec3World(R @ force_body)


def aero_moment_body(
    q: float, S: float, b: float, c_bar: float,
    C_l: float, C_m: float, C_n: float,
    D_omega: np.ndarray, omega_body: Vec3Body,
) -> Vec3Body:
    """qS (C_l b e1 + C_m c_bar e2 + C_n b e3) + D_omega omega."""
    qS = q * S
    static = np.array([qS * b * C_l, qS * c_bar * C_m, qS * b * C_n])
    return Vec3Body(static + D_omega @ omega_body)


def distributed_aero_moment(
    surfaces: Sequence[LiftingSurface],
    v_a_body: Vec3Body,
    omega_body: Vec3Body,
    rho: float,
) -> Vec3Body:
    """
    Moment of several lifting surfaces about the centre of mass.

    Each surface sees the local flow v_a + omega x r_i and contributes
    r_i x F_i with its own polar.

    Raises:
        DegenerateLiftError: With the index of the surface whose flow is
            parallel to its normal
    """
    total = np.zeros(3)
    for index, surface in enumerate(surfaces):
        local_flow = v_a_body + cross(omega_body, surface.r_body)
        speed = norm(local_flow)
        if speed == 0.0:
            continue
        e_a = local_flow / speed
        try:
            dirs = aero_directions(e_a, surface.normal_body)
        except DegenerateLiftError as exc:
            raise DegenerateLiftError(f"surface {index}: {exc}", surface_index=index) from exc
        C_L, C_D = polar_eval(surface.polar, angle_of_attack(e_a))
        force = aero_force_body(0.5 * rho * speed * speed, surface.S, C_D, C_L, 0.0, dirs)
        total += cross(surface.r_body, force)
    return Vec3Body(total)


def offset_force_moment(r_body: Vec3Body, f_world: Vec3World, R: Rot3) -> Vec3Body:
    """Body moment r x (R^T f) of a world force applied at r_body."""
    return Vec3Body(cross(r_body, R.T @ f_world))
