"""
Forward Newton-Euler simulation.

Integrates the rigid-body equations with a fourth-order Runge-Kutta scheme;
the attitude is advanced with the exponential map so it stays a rotation.
Used as an independent check of the inverse pipeline: the computed inputs are
fed back in and the commanded trajectory must come out again.
"""

import logging
import math
from dataclasses import replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..models.aircraft import AeroPolar, AircraftParams
from ..models.errors import FlightDynamicsError
from ..models.frames import Rot3, Vec3Body, Vec3World
from ..models.simulation import (
    ErrorReport,
    InputSchedule,
    RigidBodyState,
    SimulationResult,
    StateDerivative,
)
from ..models.tether import TetherScenario
from .aero_model import (
    aero_directions,
    aero_force_body,
    aero_moment_body,
    air_state,
    angle_of_attack,
    polar_eval,
)
from .geom_core import (
    geodesic_angle,
    hat,
    norm,
    orthonormality_residual,
    reorthonormalize,
    so3_exp,
)
from .inverse_dynamics import TrimError, gravity_vector, moment_coefficients, required_torque
from .settings import get_settings
from .tethered_parallel import analytic_solution, attitude_sampler, constant_rates, parallel_state


logger = logging.getLogger(__name__)

TELEMETRY_COLUMNS = (
    ["t", "px", "py", "pz"]
    + [f"R{i}{j}" for i in range(1, 4) for j in range(1, 4)]
    + ["wx_b", "wy_b", "wz_b", "pos_err", "att_err"]
)


class IntegrationError(FlightDynamicsError):
    """Exception raised when the integration produces a non-finite state."""

    def __init__(self, message: str, last_time: float):
        super().__init__(message)
        self.last_time = last_time


def tether_force(F_ext: float) -> Callable[[float, np.ndarray], np.ndarray]:
    """Tension F_ext pulling toward the origin, -F_ext p / |p|."""

    def pull(t: float, p: np.ndarray) -> np.ndarray:
        distance = norm(p)
        if distance == 0.0:
            return np.zeros(3)
        return -F_ext * np.asarray(p) / distance

    return pull


def dynamics_rhs(
    t: float,
    state: RigidBodyState,
    schedule: InputSchedule,
    params: AircraftParams,
    polar: AeroPolar,
    g: Optional[float] = None,
    eps: Optional[float] = None,
) -> StateDerivative:
    """
    Time derivative of (p, v, R, omega).

    The aerodynamic force uses the angle of attack of the simulated state and
    the lift direction from the wing normal; there is no side force. An exactly
    zero airspeed gives zero aerodynamic force. g defaults to the settings value.
    """
    g = get_settings().gravity if g is None else g
    air = air_state(state.v, schedule.wind(t, state.p), state.R, params.rho, eps)

    if air.speed > 0.0:
        flow = air.e_a_body
        C_L, C_D = polar_eval(polar, angle_of_attack(flow))
        force_aero = aero_force_body(air.q, params.S, C_D, C_L, 0.0, aero_directions(flow))
    else:
        force_aero = np.zeros(3)

    force_prop = float(schedule.thrust(t)) * params.u_t_body
    v_dot = (
        gravity_vector(g)
        + (state.R @ (force_prop + force_aero) + np.asarray(schedule.f_ext(t, state.p))) / params.m
    )

    C_l, C_m, C_n = schedule.moment_coefficients(t)
    omega = state.omega_body
    Omega = hat(omega)
    torque = (
        aero_moment_body(air.q, params.S, params.b, params.c_bar, C_l, C_m, C_n,
                         params.D_omega, omega)
        + np.asarray(schedule.tau_prop(t))
        + np.asarray(schedule.tau_ext(t))
        - Omega @ (params.I_B @ omega)
    )

    return StateDerivative(
        p_dot=Vec3World(np.array(state.v, dtype=float)),
        v_dot=Vec3World(v_dot),
        R_dot=state.R @ Omega,
        omega_dot=Vec3Body(params.I_inv @ torque),
    )


def _rk4_step(
    t: float,
    state: RigidBodyState,
    h: float,
    rhs: Callable[[float, RigidBodyState], StateDerivative],
) -> RigidBodyState:
    """
    One Runge-Kutta step on (p, v, omega).

    Stage attitudes are R exp(hat(omega_k) c h) with the previous stage rate;
    the final attitude uses the weighted stage rate.
    """
    R = state.R
    k1 = rhs(t, state)

    w1 = state.omega_body
    s2 = RigidBodyState(
        state.p + 0.5 * h * k1.p_dot,
        state.v + 0.5 * h * k1.v_dot,
        R @ so3_exp(0.5 * h * w1),
        w1 + 0.5 * h * k1.omega_dot,
    )
    k2 = rhs(t + 0.5 * h, s2)

    w2 = s2.omega_body
    s3 = RigidBodyState(
        state.p + 0.5 * h * k2.p_dot,
        state.v + 0.5 * h * k2.v_dot,
        R @ so3_exp(0.5 * h * w2),
        w1 + 0.5 * h * k2.omega_dot,
    )
    k3 = rhs(t + 0.5 * h, s3)

    w3 = s3.omega_body
    s4 = RigidBodyState(
        state.p + h * k3.p_dot,
        state.v + h * k3.v_dot,
        R @ so3_exp(h * w3),
        w1 + h * k3.omega_dot,
    )
    k4 = rhs(t + h, s4)

    w4 = s4.omega_body
    w_bar = (w1 + 2.0 * w2 + 2.0 * w3 + w4) / 6.0
    R_next = R @ so3_exp(h * w_bar)
    if orthonormality_residual(R_next) > get_settings().reorthonormalize_above:
        logger.debug("t=%.6g s: re-orthonormalizing attitude", t + h)
        R_next = reorthonormalize(R_next)

    return RigidBodyState(
        p=Vec3World(state.p + h / 6.0 * (k1.p_dot + 2.0 * k2.p_dot + 2.0 * k3.p_dot + k4.p_dot)),
        v=Vec3World(state.v + h / 6.0 * (k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot)),
        R=Rot3(R_next),
        omega_body=Vec3Body(
            w1 + h / 6.0 * (k1.omega_dot + 2.0 * k2.omega_dot + 2.0 * k3.omega_dot + k4.omega_dot)
        ),
    )


def integrate(
    state0: RigidBodyState,
    schedule: InputSchedule,
    params: AircraftParams,
    polar: AeroPolar,
    dt: float,
    t_end: float,
    g: Optional[float] = None,
    t0: float = 0.0,
    eps: Optional[float] = None,
) -> SimulationResult:
    """
    Integrate from t0 to t_end with fixed step dt.

    The last step is shortened to land on t_end. Every state is kept,
    the initial one included.

    Raises:
        IntegrationError: On a non-positive step or a non-finite state
            (last_time is the last time with a finite state)
    """
    if not (dt > 0 and math.isfinite(dt)):
        raise IntegrationError(f"time step must be positive, got {dt}", last_time=t0)
    if t_end < t0:
        raise IntegrationError(f"t_end={t_end} precedes t0={t0}", last_time=t0)
    g = get_settings().gravity if g is None else g

    def rhs(t: float, state: RigidBodyState) -> StateDerivative:
        return dynamics_rhs(t, state, schedule, params, polar, g, eps)

    times: List[float] = [t0]
    states: List[RigidBodyState] = [state0]
    n_full = int(math.floor((t_end - t0) / dt + 1e-9))
    t, state = t0, state0
    step = 0
    while True:
        remaining = t_end - t
        if remaining <= 1e-12 * max(1.0, abs(t_end)):
            break
        step += 1
        h = dt if step <= n_full else remaining
        state = _rk4_step(t, state, h, rhs)
        if not state.is_finite():
            raise IntegrationError(f"state became non-finite after t={t:.6g} s", last_time=t)
        t = t0 + step * dt if step <= n_full else t_end
        times.append(t)
        states.append(state)

    return SimulationResult(times=np.array(times), states=states)


# =============================================================================
# Round trip on the spherical parallel
# =============================================================================

def parallel_reference(
    scenario: TetherScenario, alpha: float
) -> Callable[[float], RigidBodyState]:
    """
    Exact state t -> (p, v, R, omega) of the trimmed orbit.

    The orbit is the state at t = 0 turned about e3 by omega_cir t, so only
    that state is built from the scenario; the body rate is constant.
    """
    start = parallel_state(scenario, 0.0)
    R0 = attitude_sampler(scenario, alpha)(0.0)
    omega_body = constant_rates(scenario, R0).omega_body
    rate = scenario.omega_cir

    def reference(t: float) -> RigidBodyState:
        c, s = math.cos(rate * t), math.sin(rate * t)
        turn = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        return RigidBodyState(
            Vec3World(turn @ start.p), Vec3World(turn @ start.v), Rot3(turn @ R0), omega_body
        )

    return reference


def roundtrip_inputs(
    scenario: TetherScenario, params: AircraftParams, polar: AeroPolar
) -> Tuple[InputSchedule, Callable[[float], RigidBodyState]]:
    """
    Inputs computed by inversion on the parallel, and the reference orbit.

    Raises:
        TrimError: If the scenario cannot be trimmed (negative thrust, stall
            or no root)
    """
    solution = analytic_solution(scenario, polar, params)
    if solution.trim.infeasible is not None:
        raise TrimError(
            f"scenario trim is infeasible ({solution.trim.infeasible.value})",
            solution.trim.infeasible,
        )
    zero = np.zeros(3)
    torque = required_torque(params.I_B, solution.omega_body, zero, zero, zero)
    coefficients = np.array(moment_coefficients(
        torque, params.D_omega, solution.omega_body, scenario.q, params.S, params.b, params.c_bar
    ))
    logger.debug(
        "round-trip inputs: T=%.6g N, alpha=%.6g rad, C=(%.3e, %.3e, %.3e)",
        solution.T, solution.alpha, *coefficients,
    )
    thrust = solution.T
    schedule = InputSchedule(
        thrust=lambda t: thrust,
        moment_coefficients=lambda t: coefficients,
        f_ext=tether_force(scenario.F_ext),
    )
    return schedule, parallel_reference(scenario, solution.alpha)


def compare_to_reference(
    result: SimulationResult, reference: Callable[[float], RigidBodyState], dt: float = math.nan
) -> ErrorReport:
    """Largest position, attitude and speed deviations over a run."""
    pos_err = att_err = speed_err = 0.0
    for t, state in zip(result.times, result.states):
        ref = reference(float(t))
        pos_err = max(pos_err, norm(state.p - ref.p))
        att_err = max(att_err, geodesic_angle(ref.R, state.R))
        speed_err = max(speed_err, abs(norm(state.v) - norm(ref.v)))
    return ErrorReport(
        max_pos_err=pos_err,
        max_att_err=att_err,
        max_speed_err=speed_err,
        dt=dt,
        t_end=float(result.times[-1]),
        n_steps=len(result.times) - 1,
    )


def roundtrip_run(
    scenario: TetherScenario,
    params: AircraftParams,
    polar: AeroPolar,
    dt: float = 1e-3,
    n_orbits: float = 1.0,
) -> Tuple[ErrorReport, SimulationResult, Callable[[float], RigidBodyState]]:
    """Integrate the inverted inputs along the parallel; return report, run and reference."""
    if params.rho != scenario.rho:
        logger.warning("air density %.4g differs from the scenario, using %.4g", params.rho, scenario.rho)
        params = replace(params, rho=scenario.rho)
    schedule, reference = roundtrip_inputs(scenario, params, polar)
    t_end = n_orbits * scenario.period
    result = integrate(reference(0.0), schedule, params, polar, dt, t_end, g=scenario.g)
    report = compare_to_reference(result, reference, dt)
    logger.info(
        "round trip dt=%g s over %.4g s: pos %.3e m, att %.3e rad",
        dt, t_end, report.max_pos_err, report.max_att_err,
    )
    return report, result, reference


def roundtrip_verify(
    scenario: TetherScenario,
    params: AircraftParams,
    polar: AeroPolar,
    dt: float = 1e-3,
    n_orbits: float = 1.0,
) -> ErrorReport:
    """
    Feed the inverse solution of a tethered orbit into the forward model.

    Returns:
        ErrorReport with the worst position (m), geodesic attitude (rad) and
        speed (m/s) deviation from the analytic orbit
    """
    return roundtrip_run(scenario, params, polar, dt, n_orbits)[0]


def telemetry_frame(
    result: SimulationResult, reference: Callable[[float], RigidBodyState]
) -> pd.DataFrame:
    """One row per step: time, position, attitude, body rate and errors."""
    rows = []
    for t, state in zip(result.times, result.states):
        ref = reference(float(t))
        rows.append(
            [float(t), *state.p, *np.asarray(state.R).reshape(-1), *state.omega_body,
             norm(state.p - ref.p), geodesic_angle(ref.R, state.R)]
        )
    return pd.DataFrame(rows, columns=TELEMETRY_COLUMNS)


def convergence_order(errors: Sequence[float], dts: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(dt)."""
    errors = np.asarray(errors, dtype=float)
    dts = np.asarray(dts, dtype=float)
    if errors.shape != dts.shape or errors.size < 2:
        raise ValueError("need at least two (dt, error) pairs")
    if np.any(errors <= 0) or np.any(dts <= 0):
        raise ValueError("errors and steps must be positive")
    slope, _ = np.polyfit(np.log(dts), np.log(errors), 1)
    return float(slope)
