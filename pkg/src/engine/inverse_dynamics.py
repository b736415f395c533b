"""
Pointwise inverse flight dynamics.

Given a centre-of-mass trajectory and the external loads, reconstruct at each
sample the attitude of a coordinated (zero sideslip) aircraft, the thrust and
angle of attack balancing the required force, the body rates, and the moment
coefficients and surface deflections producing the required torque.
"""

import logging
import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from ..models.aircraft import AeroPolar, AircraftParams
from ..models.errors import FlightDynamicsError
from ..models.frames import E1, E2, E3, Rot3, Vec3Body, Vec3World
from ..models.trajectory import (
    AllocationResult,
    ControlAllocation,
    ForceDecomposition,
    InfeasibleReason,
    InverseSolution,
    InversionOptions,
    SampleFlags,
    TrajectoryPoint,
    TrimPair,
)
from .aero_model import air_state, polar_eval, sideslip
from .geom_core import (
    cross,
    frame_rate_fd,
    norm,
    rotation_from_axes,
    segmented_frame_rates,
    unit,
)
from .settings import get_settings


logger = logging.getLogger(__name__)

VERTICAL_TOL = 1e-6
ZERO_THRUST_REL = 1e-12


class InverseDynamicsError(FlightDynamicsError):
    """Exception raised when a sample cannot be inverted."""

    def __init__(self, message: str, reason: Optional[InfeasibleReason] = None):
        super().__init__(message)
        self.reason = reason


class TrimError(InverseDynamicsError):
    """Exception raised when no (T, alpha) pair balances the force."""
    pass


class DegenerateFrameError(InverseDynamicsError):
    """Exception raised when no wings-level frame exists (vertical flow)."""
    pass


def gravity_vector(g: float) -> Vec3World:
    """World gravity (0, 0, -g)."""
    return Vec3World(np.array([0.0, 0.0, -g]))


# =============================================================================
# Force demand and attitude
# =============================================================================

def required_force(pt: TrajectoryPoint, m: float, g: Optional[float] = None) -> Vec3World:
    """F_req = m a - m g - f_ext. Wind does not enter; g defaults to the settings value."""
    g = get_settings().gravity if g is None else g
    return Vec3World(m * pt.a - m * gravity_vector(g) - pt.f_ext_world)


def decompose(
    F_req: Vec3World, e_a_world: Vec3World, rel_tol: Optional[float] = None
) -> ForceDecomposition:
    """
    Split the required force along and across the flow.

    When the cross-flow part is not degenerate the trajectory frame
    n_curve = F_perp / f_perp, s_traj = n_curve x e_a is filled in.

    Args:
        F_req: Required force in N
        e_a_world: Unit flow direction
        rel_tol: Degeneracy threshold relative to max(1, |F_req|)

    Returns:
        ForceDecomposition
    """
    rel_tol = get_settings().perp_degeneracy_rel if rel_tol is None else rel_tol
    f_par = float(F_req @ e_a_world)
    F_perp = F_req - f_par * e_a_world
    f_perp = norm(F_perp)
    degenerate = f_perp < rel_tol * max(1.0, norm(F_req))
    if degenerate:
        return ForceDecomposition(Vec3World(F_req), f_par, Vec3World(F_perp), f_perp, True)
    n_curve = F_perp / f_perp
    return ForceDecomposition(
        F_req_world=Vec3World(F_req),
        f_par=f_par,
        F_perp_world=Vec3World(F_perp),
        f_perp=f_perp,
        degenerate=False,
        n_curve_world=Vec3World(n_curve),
        s_traj_world=Vec3World(cross(n_curve, e_a_world)),
    )


def degenerate_perp_frame(
    e_a_world: Vec3World, previous_R: Optional[Rot3] = None
) -> Tuple[Vec3World, Vec3World]:
    """
    Wings-level trajectory frame for a force demand along the flow.

    The lift axis is world up projected onto the plane orthogonal to the
    flow. In vertical flight the previous attitude is projected instead.

    Returns:
        Tuple of (n_curve, s_traj)

    Raises:
        DegenerateFrameError: In vertical flight without a previous attitude
    """
    projection = E3 - float(E3 @ e_a_world) * e_a_world
    if norm(projection) >= VERTICAL_TOL:
        n_curve = unit(projection)
    elif previous_R is not None:
        previous_n = previous_R[:, 2] - float(previous_R[:, 2] @ e_a_world) * e_a_world
        if norm(previous_n) >= VERTICAL_TOL:
            n_curve = unit(previous_n)
        else:
            previous_s = previous_R[:, 1] - float(previous_R[:, 1] @ e_a_world) * e_a_world
            n_curve = unit(cross(e_a_world, unit(previous_s)))
    else:
        raise DegenerateFrameError(
            "flow is vertical and no previous attitude is available",
            InfeasibleReason.VERTICAL_FLIGHT,
        )
    return Vec3World(n_curve), Vec3World(cross(n_curve, e_a_world))


def body_axes(
    alpha: float, e_a_world: Vec3World, s_world: Vec3World, n_curve_world: Vec3World
) -> Rot3:
    """
    Pitch the trajectory frame by alpha about the span axis.

    Returns:
        R = [c s n] with c = cos(a) e_a + sin(a) n_curve and
        n = -sin(a) e_a + cos(a) n_curve
    """
    ca, sa = math.cos(alpha), math.sin(alpha)
    c = ca * e_a_world + sa * n_curve_world
    n = -sa * e_a_world + ca * n_curve_world
    return rotation_from_axes(c, s_world, n)


def bank_angle_of(R: Rot3, e_a_world: Vec3World) -> float:
    """
    Geometric bank of the lift axis about the flow, positive to the left.

    Measured from the wings-level lift direction (world up projected normal
    to the flow). NaN in vertical flow.
    """
    level = E3 - float(E3 @ e_a_world) * e_a_world
    normal = R[:, 2] - float(R[:, 2] @ e_a_world) * e_a_world
    if norm(level) < VERTICAL_TOL or norm(normal) == 0.0:
        return math.nan
    level = unit(level)
    lift = unit(normal)
    left = cross(level, e_a_world)
    return math.atan2(float(lift @ left), float(lift @ level))


# =============================================================================
# Thrust and angle of attack
# =============================================================================

class _NoBracket(Exception):
    pass


class _OutOfRange(Exception):
    pass


def _safeguarded_newton(
    fun: Callable[[float], float],
    dfun: Callable[[float], float],
    lo: float,
    hi: float,
    x0: float,
    tol: float,
    max_iter: int,
) -> Tuple[float, int]:
    """Newton with bisection fallback inside a sign-change bracket."""
    f_lo, f_hi = fun(lo), fun(hi)
    if f_lo == 0.0:
        return lo, 0
    if f_hi == 0.0:
        return hi, 0
    if f_lo * f_hi > 0:
        raise _NoBracket()
    if f_lo > 0:
        lo, hi = hi, lo  # keep fun(lo) < 0 < fun(hi)

    x = min(max(x0, min(lo, hi)), max(lo, hi))
    for iteration in range(1, max_iter + 1):
        f = fun(x)
        if f == 0.0:
            return x, iteration
        if f < 0:
            lo = x
        else:
            hi = x
        left, right = min(lo, hi), max(lo, hi)
        df = dfun(x)
        x_new = x - f / df if df != 0.0 else math.nan
        if not left < x_new < right:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= tol or right - left <= tol:
            return x_new, iteration
        x = x_new
    raise TrimError(
        f"bracketed Newton did not converge in {max_iter} iterations", InfeasibleReason.NO_TRIM
    )


def _plain_newton(
    fun: Callable[[float], float],
    dfun: Callable[[float], float],
    x0: float,
    tol: float,
    max_iter: int,
) -> Tuple[float, int]:
    """Unbracketed Newton (scipy) restricted to |x| < pi/2."""

    def inside(f: Callable[[float], float]) -> Callable[[float], float]:
        def wrapped(x: float) -> float:
            if not abs(x) < math.pi / 2:
                raise _OutOfRange()
            return f(x)
        return wrapped

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            result = optimize.root_scalar(
                inside(fun), x0=x0, fprime=inside(dfun), method="newton",
                xtol=tol, maxiter=max_iter,
            )
    except (_OutOfRange, RuntimeError, ArithmeticError, ValueError) as exc:
        logger.debug("unbracketed Newton failed: %r", exc)
        result = None
    if result is None or not result.converged or not abs(result.root) < math.pi / 2:
        raise TrimError("no trim angle of attack found", InfeasibleReason.NO_TRIM)
    return float(result.root), int(result.iterations)


def _finish_trim(
    alpha: float,
    iterations: int,
    f_par: float,
    f_perp: float,
    qS: float,
    polar: AeroPolar,
    alpha_max: float,
) -> TrimPair:
    C_L, C_D = polar_eval(polar, alpha)
    T_par = f_par + qS * C_D
    T_perp = f_perp - qS * C_L
    magnitude = math.hypot(T_par, T_perp)
    signed = T_par * math.cos(alpha) + T_perp * math.sin(alpha)
    scale = max(1.0, abs(f_par), abs(f_perp), qS)

    reason = None
    if magnitude <= ZERO_THRUST_REL * scale:
        residual = 0.0
        T = magnitude
    elif signed < 0:
        T = signed
        residual = abs(_wrap(alpha - math.atan2(-T_perp, -T_par)))
        reason = InfeasibleReason.NEGATIVE_THRUST
    else:
        T = magnitude
        residual = abs(_wrap(alpha - math.atan2(T_perp, T_par)))
    if reason is None and abs(alpha) > alpha_max:
        reason = InfeasibleReason.STALL
    return TrimPair(T=T, alpha=alpha, iterations=iterations, residual=residual, infeasible=reason)


def _wrap(angle: float) -> float:
    return math.atan2(math.sin(angle), math.cos(angle))


def solve_trim(
    f_par: float,
    f_perp: float,
    q: float,
    S: float,
    polar: AeroPolar,
    alpha0: float = 0.0,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    alpha_max: Optional[float] = None,
) -> TrimPair:
    """
    Solve T cos(a) = f_par + qS C_D(a), T sin(a) = f_perp - qS C_L(a).

    The root of h(a) = T_par(a) sin(a) - T_perp(a) cos(a) is bracketed on
    [-alpha_max, alpha_max] and refined by safeguarded Newton; its roots with
    T >= 0 are the fixed points a = atan2(T_perp(a), T_par(a)). Without a
    sign change, plain Newton from alpha0 is tried and a root beyond
    alpha_max is returned flagged as stall.

    Args:
        f_par: Required force along the flow, N
        f_perp: Required force across the flow, N (>= 0)
        q: Dynamic pressure, Pa
        S: Reference area, m^2
        polar: Coefficient maps
        alpha0: Starting guess, rad
        tol: Step tolerance, rad
        max_iter: Iteration cap
        alpha_max: Stall bound, rad

    Returns:
        TrimPair; infeasible is set for negative thrust or stall

    Raises:
        TrimError: If no root is found (reason no-trim) or q is not positive
    """
    settings = get_settings()
    tol = settings.trim_tolerance if tol is None else tol
    max_iter = settings.trim_max_iterations if max_iter is None else max_iter
    alpha_max = settings.alpha_max if alpha_max is None else alpha_max
    if not q > 0:
        raise TrimError(
            f"dynamic pressure must be positive, got {q}", InfeasibleReason.NO_DYNAMIC_PRESSURE
        )
    qS = q * S

    def balance(alpha: float) -> float:
        C_L, C_D = polar_eval(polar, alpha)
        return (f_par + qS * C_D) * math.sin(alpha) - (f_perp - qS * C_L) * math.cos(alpha)

    def balance_slope(alpha: float) -> float:
        C_L, C_D = polar_eval(polar, alpha)
        T_par = f_par + qS * C_D
        T_perp = f_perp - qS * C_L
        dT_par = qS * polar.drag_slope(alpha)
        dT_perp = -qS * polar.lift_slope(alpha)
        sa, ca = math.sin(alpha), math.cos(alpha)
        return dT_par * sa + T_par * ca - dT_perp * ca + T_perp * sa

    try:
        alpha, iterations = _safeguarded_newton(
            balance, balance_slope, -alpha_max, alpha_max, alpha0, tol, max_iter
        )
    except _NoBracket:
        logger.debug("no sign change on +-%.4f rad, trying unbracketed Newton", alpha_max)
        alpha, iterations = _plain_newton(balance, balance_slope, alpha0, tol, max_iter)

    return _finish_trim(alpha, iterations, f_par, f_perp, qS, polar, alpha_max)


def solve_trim_smallangle(
    f_par: float,
    f_perp: float,
    q: float,
    S: float,
    polar: AeroPolar,
    alpha0: float = 0.0,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    alpha_max: Optional[float] = None,
) -> TrimPair:
    """
    Scalar trim equation with the small-angle polar.

    tan(a) (f_par + qS (C_D0 + k_alpha a^2)) = f_perp - qS a_L a, where a_L
    is the lift slope. Thrust follows from the same balance as solve_trim.
    """
    settings = get_settings()
    tol = settings.trim_tolerance if tol is None else tol
    max_iter = settings.trim_max_iterations if max_iter is None else max_iter
    alpha_max = settings.alpha_max if alpha_max is None else alpha_max
    if not q > 0:
        raise TrimError(
            f"dynamic pressure must be positive, got {q}", InfeasibleReason.NO_DYNAMIC_PRESSURE
        )
    qS = q * S
    small = AeroPolar(a=polar.a, C_D0=polar.C_D0, k=polar.k, k_alpha=polar.k_alpha)

    def residual(alpha: float) -> float:
        axial = f_par + qS * (small.C_D0 + small.k_alpha * alpha * alpha)
        return math.tan(alpha) * axial - (f_perp - qS * small.a * alpha)

    def residual_slope(alpha: float) -> float:
        axial = f_par + qS * (small.C_D0 + small.k_alpha * alpha * alpha)
        sec2 = 1.0 / math.cos(alpha) ** 2
        return sec2 * axial + math.tan(alpha) * 2.0 * qS * small.k_alpha * alpha + qS * small.a

    try:
        alpha, iterations = _safeguarded_newton(
            residual, residual_slope, -alpha_max, alpha_max, alpha0, tol, max_iter
        )
    except _NoBracket:
        alpha, iterations = _plain_newton(residual, residual_slope, alpha0, tol, max_iter)

    return _finish_trim(alpha, iterations, f_par, f_perp, qS, small, alpha_max)


# =============================================================================
# Torque, coefficients, surfaces
# =============================================================================

def required_torque(
    I_B: np.ndarray,
    omega_body: Vec3Body,
    omega_dot_body: Vec3Body,
    tau_ext_body: Vec3Body,
    tau_prop_body: Vec3Body,
) -> Vec3Body:
    """tau_req = I w_dot + w x (I w) - tau_ext - tau_prop."""
    return Vec3Body(
        I_B @ omega_dot_body + cross(omega_body, I_B @ omega_body) - tau_ext_body - tau_prop_body
    )


def moment_coefficients(
    tau_req_body: Vec3Body,
    D_omega: np.ndarray,
    omega_body: Vec3Body,
    q: float,
    S: float,
    b: float,
    c_bar: float,
    q_min: Optional[float] = None,
) -> Tuple[float, float, float]:
    """
    Moment coefficients (C_l, C_m, C_n) in FLU signs.

    zeta = tau_req - D_omega w is divided by (qSb, qS c_bar, qSb).

    Raises:
        InverseDynamicsError: If q is below q_min (reason no-dynamic-pressure)
    """
    q_min = get_settings().q_min if q_min is None else q_min
    if not q > q_min:
        raise InverseDynamicsError(
            f"dynamic pressure {q:.3g} Pa is below {q_min:.3g} Pa",
            InfeasibleReason.NO_DYNAMIC_PRESSURE,
        )
    zeta = tau_req_body - D_omega @ omega_body
    qS = q * S
    return float(zeta[0] / (qS * b)), float(zeta[1] / (qS * c_bar)), float(zeta[2] / (qS * b))


def allocate_controls(
    alloc: ControlAllocation,
    C_req: Sequence[float],
    alpha: float,
    beta: float,
    omega_body: Vec3Body,
) -> AllocationResult:
    """
    Surface deflections producing the required moment coefficients.

    Square well-conditioned maps are inverted directly; otherwise a Tikhonov
    pseudoinverse with lambda = scale * |B|_2^2 is used. Deflections are
    clamped to the limits and the clamped axes are reported.

    Raises:
        InverseDynamicsError: If B_eff has rank < 3 (reason unallocatable)
    """
    settings = get_settings()
    B = alloc.matrix(alpha)
    rhs = np.asarray(C_req, dtype=float) - alloc.passive(alpha, beta, omega_body)

    if np.linalg.matrix_rank(B) < 3:
        raise InverseDynamicsError(
            "control effectiveness has rank < 3", InfeasibleReason.UNALLOCATABLE
        )
    if B.shape[1] == 3 and np.linalg.cond(B) < settings.cond_max:
        u = np.linalg.solve(B, rhs)
    else:
        lam = settings.tikhonov_scale * np.linalg.norm(B, 2) ** 2
        u = np.linalg.solve(B.T @ B + lam * np.eye(B.shape[1]), B.T @ rhs)

    clamped = np.clip(u, alloc.u_min, alloc.u_max)
    saturated = tuple(int(i) for i in np.flatnonzero(clamped != u))
    if saturated:
        logger.debug("surface deflection clamped on axes %s", saturated)
    return AllocationResult(u=clamped, saturated_axes=saturated)


# =============================================================================
# Pipeline
# =============================================================================

@dataclass
class _AttitudeSample:
    R: np.ndarray
    T: float
    alpha: float
    q: float
    F_req: np.ndarray
    e_a: np.ndarray
    flags: SampleFlags


def _nan_rotation() -> np.ndarray:
    return np.full((3, 3), math.nan)


def _thrust_only_attitude(F_req: np.ndarray, previous_R: Optional[np.ndarray]) -> Tuple[Rot3, float]:
    """Point the chord along F_req; keep the previous normal where possible."""
    thrust = norm(F_req)
    if thrust > 0:
        c = F_req / thrust
    else:
        c = previous_R[:, 0] if previous_R is not None else E1.copy()
    candidates = [previous_R[:, 2]] if previous_R is not None else []
    candidates += [E3, -E1, E2]
    for candidate in candidates:
        projection = candidate - float(candidate @ c) * c
        if norm(projection) >= VERTICAL_TOL:
            n = unit(projection)
            break
    return rotation_from_axes(c, cross(n, c), n), thrust


def _coupled_polar(polar: AeroPolar, coupling: Callable, u: np.ndarray) -> AeroPolar:
    def lift(alpha: float) -> float:
        return polar.lift(alpha) + float(coupling(alpha, u)[0])

    def drag(alpha: float) -> float:
        return polar.drag(alpha) + float(coupling(alpha, u)[1])

    return replace(polar, cl_fn=lift, cd_fn=drag)


def _construct_attitudes(
    samples: Sequence[TrajectoryPoint],
    params: AircraftParams,
    polar: AeroPolar,
    options: InversionOptions,
    coupling: Optional[Callable],
    u_previous: Optional[List[np.ndarray]],
) -> List[_AttitudeSample]:
    settings = get_settings()
    eps = settings.eps_airspeed if options.eps is None else options.eps
    identity = np.eye(3)
    records: List[_AttitudeSample] = []
    previous_R: Optional[np.ndarray] = None
    alpha_guess = 0.0

    for index, pt in enumerate(samples):
        flags = SampleFlags()
        F_req = required_force(pt, params.m, options.g)
        air = air_state(pt.v, pt.w_world, identity, params.rho, eps)

        if air.regularized:
            flags = replace(flags, regularized_airspeed=True)
            R, T = _thrust_only_attitude(F_req, previous_R)
            records.append(_AttitudeSample(R, T, 0.0, air.q, F_req, air.e_a_world, flags))
            previous_R = R
            continue

        e_a = air.e_a_world
        decomposition = decompose(F_req, e_a, settings.perp_degeneracy_rel)
        if decomposition.degenerate:
            flags = replace(flags, degenerate_perp=True)
            try:
                n_curve, s_traj = degenerate_perp_frame(e_a, previous_R)
            except DegenerateFrameError as exc:
                flags = flags.with_reason(exc.reason)
                records.append(_AttitudeSample(
                    _nan_rotation(), math.nan, math.nan, air.q, F_req, e_a, flags
                ))
                continue
        else:
            n_curve, s_traj = decomposition.n_curve_world, decomposition.s_traj_world

        sample_polar = polar
        if coupling is not None and u_previous is not None and np.all(np.isfinite(u_previous[index])):
            sample_polar = _coupled_polar(polar, coupling, u_previous[index])

        try:
            trim = solve_trim(
                decomposition.f_par,
                decomposition.f_perp,
                air.q,
                params.S,
                sample_polar,
                alpha0=alpha_guess,
                alpha_max=params.alpha_max,
            )
        except TrimError as exc:
            flags = flags.with_reason(exc.reason)
            records.append(_AttitudeSample(
                _nan_rotation(), math.nan, math.nan, air.q, F_req, e_a, flags
            ))
            continue

        if trim.infeasible is not None:
            flags = flags.with_reason(trim.infeasible)
        if trim.T > params.T_max:
            flags = flags.with_reason(InfeasibleReason.THRUST_LIMIT)

        R = body_axes(trim.alpha, e_a, s_traj, n_curve)
        records.append(_AttitudeSample(R, trim.T, trim.alpha, air.q, F_req, e_a, flags))
        previous_R = R
        alpha_guess = trim.alpha

    return records


def _body_rates(
    samples: Sequence[TrajectoryPoint],
    records: List[_AttitudeSample],
    options: InversionOptions,
) -> Tuple[np.ndarray, np.ndarray]:
    if options.attitude_sampler is not None:
        omega, omega_dot = [], []
        for pt in samples:
            _, angular = frame_rate_fd(options.attitude_sampler, pt.t)
            omega.append(angular.omega_body)
            omega_dot.append(angular.omega_dot_body)
        return np.array(omega), np.array(omega_dot)

    times = np.array([pt.t for pt in samples])
    rotations = np.array([record.R for record in records])
    return segmented_frame_rates(times, rotations, options.skew_tolerance)


def _complete_sample(
    pt: TrajectoryPoint,
    record: _AttitudeSample,
    omega: np.ndarray,
    omega_dot: np.ndarray,
    params: AircraftParams,
    alloc: Optional[ControlAllocation],
    options: InversionOptions,
) -> InverseSolution:
    flags = record.flags
    R = record.R
    valid = bool(np.all(np.isfinite(R)))
    e_a = record.e_a
    flow_len = norm(e_a)

    beta = sideslip(R.T @ (e_a / flow_len)) if valid and flow_len > 0 else math.nan
    bank = bank_angle_of(R, e_a / flow_len) if valid and flow_len > 0 else math.nan
    if valid and not (np.all(np.isfinite(omega)) and np.all(np.isfinite(omega_dot))):
        flags = flags.with_reason(InfeasibleReason.RATES_UNDEFINED)

    tau_prop = np.zeros(3) if options.tau_prop is None else np.asarray(options.tau_prop(pt.t))
    tau_req = required_torque(params.I_B, omega, omega_dot, pt.tau_ext_body, tau_prop)
    try:
        C_l, C_m, C_n = moment_coefficients(
            tau_req, params.D_omega, omega, record.q, params.S, params.b, params.c_bar
        )
    except InverseDynamicsError as exc:
        flags = flags.with_reason(exc.reason)
        C_l = C_m = C_n = math.nan

    if alloc is None:
        u = np.zeros(0)
    elif valid and math.isfinite(C_l) and math.isfinite(C_m) and math.isfinite(C_n):
        try:
            allocation = allocate_controls(alloc, (C_l, C_m, C_n), record.alpha, beta, omega)
            u = allocation.u
            if allocation.saturated:
                flags = flags.with_reason(InfeasibleReason.SATURATION)
        except InverseDynamicsError as exc:
            flags = flags.with_reason(exc.reason)
            u = np.full(alloc.n_u, math.nan)
    else:
        u = np.full(alloc.n_u, math.nan)

    if not flags.is_feasible:
        logger.warning("t=%.6g s: %s", pt.t, flags.to_text())

    return InverseSolution(
        t=pt.t,
        R=Rot3(R),
        omega_body=Vec3Body(np.asarray(omega, dtype=float)),
        omega_dot_body=Vec3Body(np.asarray(omega_dot, dtype=float)),
        T=record.T,
        alpha=record.alpha,
        beta=beta,
        bank=bank,
        C_l=C_l,
        C_m=C_m,
        C_n=C_n,
        u=u,
        flags=flags,
        F_req_world=Vec3World(record.F_req),
        e_a_world=Vec3World(e_a),
        q=record.q,
    )


def invert_trajectory(
    samples: Sequence[TrajectoryPoint],
    params: AircraftParams,
    polar: AeroPolar,
    alloc: Optional[ControlAllocation] = None,
    options: Optional[InversionOptions] = None,
) -> List[InverseSolution]:
    """
    Run the inversion pipeline on a sampled trajectory.

    Per sample: required force, flow decomposition, trajectory frame, trim,
    attitude. Then body rates from the attitude history (or from
    options.attitude_sampler), required torque, moment coefficients and
    surface deflections. With options.couple_controls the surface force
    increments are fed back into the trim until the deflections settle.

    Infeasible samples are flagged, never raised.

    Raises:
        InverseDynamicsError: If the sample times are not strictly increasing
            or fewer than 3 samples are given without an attitude sampler
    """
    options = options or InversionOptions()
    samples = list(samples)
    if len(samples) < 3 and options.attitude_sampler is None:
        raise InverseDynamicsError("at least 3 samples are needed to differentiate attitudes")
    times = np.array([pt.t for pt in samples])
    if np.any(np.diff(times) <= 0):
        raise InverseDynamicsError("sample times must be strictly increasing")
    if norm(params.u_t_body - E1) > 1e-12:
        logger.warning("thrust axis differs from the chord; inversion assumes thrust along c")

    settings = get_settings()
    coupling = alloc.force_coupling if (alloc is not None and options.couple_controls) else None
    passes = 1
    if coupling is not None:
        passes = options.max_coupling_passes or settings.coupling_max_passes
    coupling_tol = options.coupling_tol or settings.coupling_tolerance

    u_previous: Optional[List[np.ndarray]] = None
    solutions: List[InverseSolution] = []
    for pass_index in range(passes):
        records = _construct_attitudes(samples, params, polar, options, coupling, u_previous)
        omega, omega_dot = _body_rates(samples, records, options)
        solutions = [
            _complete_sample(pt, record, omega[i], omega_dot[i], params, alloc, options)
            for i, (pt, record) in enumerate(zip(samples, records))
        ]
        if coupling is None:
            break
        u_now = [solution.u for solution in solutions]
        if u_previous is not None:
            change = max(
                (_finite_norm(a - b) for a, b in zip(u_now, u_previous)), default=0.0
            )
            logger.debug("coupling pass %d: max |du| = %.3e", pass_index, change)
            if change < coupling_tol:
                break
        u_previous = u_now

    return solutions


def _finite_norm(v: np.ndarray) -> float:
    """Euclidean norm of the finite components."""
    return float(np.linalg.norm(v[np.isfinite(v)]))
