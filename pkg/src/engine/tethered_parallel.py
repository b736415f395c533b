"""
Tethered flight on a spherical parallel.

The aircraft circles at constant speed at colatitude theta on a sphere of
radius L around the tether anchor. The force demand is constant in the
rotating frame, which gives closed forms for the trim, the bank angle, the
tension that levels the wings and its sensitivities.
"""

import logging
import math
from typing import Callable, Iterable, List, Optional

import numpy as np

from ..models.aircraft import AeroPolar, AircraftParams
from ..models.frames import E3, AngularState, Rot3, Vec3Body, Vec3World
from ..models.tether import (
    BankRegime,
    BankResult,
    DemandComponents,
    SensitivityReport,
    TetherScenario,
    TetherScenarioError,
    TetherSolution,
    TetherSweepRow,
)
from ..models.trajectory import TrajectoryPoint, TrimPair
from .inverse_dynamics import TrimError, body_axes, solve_trim
from .settings import get_settings


logger = logging.getLogger(__name__)

__all__ = [
    "TetherScenarioError",
    "parallel_state",
    "demand",
    "implicit_trim",
    "cardano_alpha",
    "cardano_trim",
    "bank_angle",
    "bank_angle_dimensionless",
    "zero_bank_tension",
    "zero_bank_eta",
    "sensitivities_at_locus",
    "classify_regime",
    "induced_drag_of_lift",
    "specific_force",
    "perceived_bank_offset",
    "constant_rates",
    "analytic_solution",
    "attitude_sampler",
    "tension_sweep",
]


def _radial_basis(psi: float):
    """Outward horizontal unit vector u_rxy and tangent e_t at azimuth psi."""
    c, s = math.cos(psi), math.sin(psi)
    return np.array([c, s, 0.0]), np.array([-s, c, 0.0])


def azimuth(s: TetherScenario, t: float) -> float:
    """psi(t) = psi0 + omega_cir t."""
    return s.psi0 + s.omega_cir * t


# =============================================================================
# Trajectory and force demand
# =============================================================================

def parallel_state(s: TetherScenario, t: float) -> TrajectoryPoint:
    """
    Position, velocity, acceleration and tether force at time t.

    The tether pulls toward the anchor: f_ext = -F_ext p / L. No wind.
    """
    u_rxy, e_t = _radial_basis(azimuth(s, t))
    p = s.r * u_rxy + s.z0 * E3
    return TrajectoryPoint(
        t=t,
        p=p,
        v=s.v0 * e_t,
        a=-(s.v0 ** 2 / s.r) * u_rxy,
        f_ext_world=-s.F_ext * p / s.L,
    )


def demand(s: TetherScenario, psi: float) -> DemandComponents:
    """
    Required force F_req = A_h u_rxy + A_z e3 and its trajectory frame.

    Raises:
        TetherScenarioError: If A_h = A_z = 0
    """
    A_h = -s.m * s.v0 ** 2 / s.r + s.F_ext * s.r / s.L
    A_z = s.m * s.g + s.F_ext * s.z0 / s.L
    f_perp = math.hypot(A_h, A_z)
    if f_perp == 0.0:
        raise TetherScenarioError("required force vanishes; no trajectory frame exists")
    u_rxy, _ = _radial_basis(psi)
    n_curve = (A_h * u_rxy + A_z * E3) / f_perp
    s_axis = (A_h / f_perp) * E3 - (A_z / f_perp) * u_rxy
    return DemandComponents(
        A_h=A_h,
        A_z=A_z,
        f_perp=f_perp,
        n_curve_world=Vec3World(n_curve),
        s_world=Vec3World(s_axis),
    )


# =============================================================================
# Trim
# =============================================================================

def implicit_trim(
    s: TetherScenario, polar: AeroPolar, params: Optional[AircraftParams] = None, S: Optional[float] = None
) -> TrimPair:
    """
    Full trim with f_par = 0, f_perp = |(A_h, A_z)| and q = 0.5 rho v0^2.

    The reference area and stall bound come from params; S may be given
    directly instead.
    """
    area, alpha_max = _area_and_limit(params, S)
    components = demand(s, s.psi0)
    return solve_trim(0.0, components.f_perp, s.q, area, polar, alpha_max=alpha_max)


def cardano_alpha(k_alpha: float, C_D0: float, a: float, f_over_Q: float) -> float:
    """
    Real root of k_alpha x^3 + (C_D0 + a) x = f_over_Q.

    With p = (C_D0 + a)/k_alpha and d = f_over_Q/k_alpha the discriminant
    (d/2)^2 + (p/3)^3 is positive, so the root is unique.
    """
    if not (k_alpha > 0 and C_D0 + a > 0):
        raise ValueError("the cubic needs k_alpha > 0 and C_D0 + a > 0")
    p = (C_D0 + a) / k_alpha
    d = f_over_Q / k_alpha
    if d == 0.0:
        return 0.0
    # u^3 + v^3 = |d|, uv = -p/3; x = |d| / (u^2 - uv + v^2) has no cancellation
    u = float(np.cbrt(abs(d) / 2 + math.sqrt((d / 2) ** 2 + (p / 3) ** 3)))
    v = -p / (3.0 * u)
    return math.copysign(abs(d) / (u * u + p / 3 + v * v), d)


def cardano_trim(
    s: TetherScenario, polar: AeroPolar, params: Optional[AircraftParams] = None, S: Optional[float] = None
) -> TrimPair:
    """
    Small-angle trim from the cubic balance.

    Lift balance with sin(a) ~ a and T ~ D gives
    k_alpha a^3 + (C_D0 + a_L) a = f_perp / Q, Q = qS; the thrust is the
    drag over cos(a).
    """
    area, alpha_max = _area_and_limit(params, S)
    Q = s.q * area
    components = demand(s, s.psi0)
    alpha = cardano_alpha(polar.k_alpha, polar.C_D0, polar.a, components.f_perp / Q)
    T = Q * (polar.C_D0 + polar.k_alpha * alpha * alpha) / math.cos(alpha)
    residual = abs(polar.k_alpha * alpha ** 3 + (polar.C_D0 + polar.a) * alpha - components.f_perp / Q)
    return TrimPair(T=T, alpha=alpha, iterations=0, residual=residual)


def _area_and_limit(params: Optional[AircraftParams], S: Optional[float]):
    if params is not None:
        return params.S, params.alpha_max
    if S is None:
        raise ValueError("either params or S must be given")
    return S, get_settings().alpha_max


# =============================================================================
# Bank angle
# =============================================================================

def bank_angle_dimensionless(kappa: float, eta: float, theta: float) -> float:
    """
    tan(mu) = (kappa/sin(theta) - eta sin(theta)) / (1 + eta cos(theta)).

    Raises:
        TetherScenarioError: If the denominator is not positive (inverted)
    """
    denominator = 1.0 + eta * math.cos(theta)
    if not denominator > 0:
        raise TetherScenarioError(
            f"tension pushes the aircraft inverted (1 + eta cos(theta) = {denominator:.3g})"
        )
    numerator = kappa / math.sin(theta) - eta * math.sin(theta)
    return math.atan(numerator / denominator)


def bank_angle(s: TetherScenario) -> BankResult:
    """Signed bank angle (positive inward) and regime of a scenario."""
    components = demand(s, s.psi0)
    if not components.A_z > 0:
        raise TetherScenarioError(
            f"vertical demand {components.A_z:.3g} N is not positive (inverted regime)"
        )
    mu = math.atan(components.A_h_in / components.A_z)
    return BankResult(mu=mu, regime=classify_regime(s.kappa, s.eta, s.theta))


def zero_bank_eta(kappa: float, theta: float) -> float:
    """eta* = kappa / sin^2(theta)."""
    return kappa / math.sin(theta) ** 2


def zero_bank_tension(s: TetherScenario) -> float:
    """Tension levelling the wings, m v0^2 L / r^2 (ignores s.F_ext)."""
    return s.m * s.v0 ** 2 * s.L / s.r ** 2


def classify_regime(
    kappa: float, eta: float, theta: float, tol: Optional[float] = None
) -> BankRegime:
    """Inward below the zero-bank locus, Outward above, ZeroBank within tol (relative)."""
    tol = get_settings().zero_bank_rel_tol if tol is None else tol
    eta_star = zero_bank_eta(kappa, theta)
    band = tol * max(abs(eta_star), 1e-300)
    if eta < eta_star - band:
        return BankRegime.INWARD
    if eta > eta_star + band:
        return BankRegime.OUTWARD
    return BankRegime.ZERO_BANK


def sensitivities_at_locus(
    kappa: float, theta: float, L: Optional[float] = None
) -> SensitivityReport:
    """
    Partials of mu with respect to eta, kappa, theta and L on eta = eta*.

    Holding v0 and F_ext, a change of L moves kappa only; d_mu_d_L is NaN
    when L is not given.
    """
    eta_star = zero_bank_eta(kappa, theta)
    sin_t, cos_t = math.sin(theta), math.cos(theta)
    D = 1.0 + eta_star * cos_t
    return SensitivityReport(
        d_mu_d_eta=-sin_t / D,
        d_mu_d_kappa=1.0 / (sin_t * D),
        d_mu_d_theta=-2.0 * kappa * cos_t / (sin_t ** 2 * D),
        d_mu_d_L=-kappa / (L * sin_t * D) if L else math.nan,
        eta_star=eta_star,
        denominator=D,
    )


# =============================================================================
# Loads seen on board
# =============================================================================

def induced_drag_of_lift(F_L: float, q: float, S: float, polar: AeroPolar) -> float:
    """D = qS C_D0 + F_L^2 k_alpha / (qS a^2)."""
    if not q > 0:
        raise ValueError(f"dynamic pressure must be positive, got {q}")
    qS = q * S
    return qS * polar.C_D0 + F_L * F_L * polar.k_alpha / (qS * polar.a ** 2)


def specific_force(R: Rot3, a_world: Vec3World, g_world: Vec3World) -> Vec3Body:
    """Accelerometer reading R^T (a - g)."""
    return Vec3Body(R.T @ (np.asarray(a_world) - np.asarray(g_world)))


def perceived_bank_offset(f_meas_body: Vec3Body) -> float:
    """Roll angle between the body normal and the measured specific force."""
    return math.atan2(float(f_meas_body[1]), float(f_meas_body[2]))


# =============================================================================
# Closed-form attitude
# =============================================================================

def attitude_sampler(s: TetherScenario, alpha: float) -> Callable[[float], Rot3]:
    """Function t -> R(t) of the trimmed aircraft on the parallel."""

    def sample(t: float) -> Rot3:
        psi = azimuth(s, t)
        _, e_t = _radial_basis(psi)
        components = demand(s, psi)
        return body_axes(alpha, e_t, components.s_world, components.n_curve_world)

    return sample


def constant_rates(s: TetherScenario, R: Rot3) -> AngularState:
    """omega_B = R^T (omega_cir e3), constant."""
    return AngularState(Vec3Body(R.T @ (s.omega_cir * E3)), Vec3Body(np.zeros(3)))


def analytic_solution(
    s: TetherScenario, polar: AeroPolar, params: AircraftParams, t: float = 0.0,
    trim: Optional[TrimPair] = None,
) -> TetherSolution:
    """Attitude, body rate, thrust, angle of attack and bank at time t."""
    trim = trim or implicit_trim(s, polar, params)
    R = attitude_sampler(s, trim.alpha)(t)
    components = demand(s, azimuth(s, t))
    return TetherSolution(
        t=t,
        R=R,
        omega_body=constant_rates(s, R).omega_body,
        T=trim.T,
        alpha=trim.alpha,
        mu=math.atan2(components.A_h_in, components.A_z),
        trim=trim,
    )


def tension_sweep(
    s: TetherScenario,
    polar: AeroPolar,
    params: AircraftParams,
    tensions: Iterable[float],
) -> List[TetherSweepRow]:
    """Bank, trim and regime for each tension, in input order."""
    return [tension_row(s.with_tension(float(F)), polar, params) for F in tensions]


def tension_row(s: TetherScenario, polar: AeroPolar, params: AircraftParams) -> TetherSweepRow:
    """One row of a tension sweep."""
    bank = bank_angle(s)
    try:
        trim = implicit_trim(s, polar, params)
        alpha_deg, T = math.degrees(trim.alpha), trim.T
        reason = trim.infeasible.value if trim.infeasible else None
    except TrimError as exc:
        alpha_deg, T = math.nan, math.nan
        reason = exc.reason.value if exc.reason else "no-trim"
    if reason:
        logger.warning("F_ext=%.4g N: trim is infeasible (%s)", s.F_ext, reason)
    return TetherSweepRow(
        F_ext=s.F_ext,
        mu_deg=bank.mu_deg,
        alpha_deg=alpha_deg,
        T=T,
        omega_cir=s.omega_cir,
        regime=bank.regime,
        F_ext_zero_bank=zero_bank_tension(s),
        feasible=reason is None,
        reason=reason,
    )
