"""Tests for the pointwise inverse-dynamics pipeline."""

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from src.engine import (
    DegenerateFrameError,
    InverseDynamicsError,
    TrimError,
    aero_directions,
    aero_force_body,
    aero_force_world,
    aero_moment_body,
    allocate_controls,
    angle_of_attack,
    attitude_sampler,
    bank_angle,
    bank_angle_of,
    body_axes,
    constant_rates,
    decompose,
    degenerate_perp_frame,
    implicit_trim,
    invert_trajectory,
    load_settings,
    moment_coefficients,
    parallel_state,
    polar_eval,
    required_force,
    required_torque,
    solve_trim,
    solve_trim_smallangle,
    so3_exp,
)
from src.models import (
    AeroPolar,
    ControlAllocation,
    InfeasibleReason,
    InversionOptions,
    TrajectoryPoint,
)


E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


def level_flight(speed, n=5, dt=0.1, wind=None):
    """Straight level flight along x at constant ground speed."""
    wind = np.zeros(3) if wind is None else np.asarray(wind, dtype=float)
    return [
        TrajectoryPoint(
            t=i * dt,
            p=np.array([speed * i * dt, 0.0, 50.0]),
            v=np.array([speed, 0.0, 0.0]),
            a=np.zeros(3),
            w_world=wind,
        )
        for i in range(n)
    ]


def trim_balance(f_par, f_perp, qS, polar):
    def h(alpha):
        C_L, C_D = polar_eval(polar, alpha)
        return (f_par + qS * C_D) * math.sin(alpha) - (f_perp - qS * C_L) * math.cos(alpha)
    return h


class TestForceDemand:
    """Tests for the required force and its decomposition."""

    def test_unaccelerated_flight_carries_weight(self):
        """With a = 0 and no external force F_req = m g e3."""
        pt = TrajectoryPoint(t=0.0, p=np.zeros(3), v=np.array([10.0, 0, 0]), a=np.zeros(3))
        np.testing.assert_allclose(required_force(pt, 2.0, 9.81), [0.0, 0.0, 19.62])

    def test_external_force_is_subtracted(self):
        """A tether pulling down adds to the demand."""
        pt = TrajectoryPoint(
            t=0.0, p=np.zeros(3), v=np.array([10.0, 0, 0]), a=np.array([1.0, 0, 0]),
            f_ext_world=np.array([0.0, 0.0, -5.0]),
        )
        np.testing.assert_allclose(required_force(pt, 2.0, 9.81), [2.0, 0.0, 24.62])

    def test_wind_does_not_enter(self):
        """The required force depends on the inertial motion only."""
        calm = TrajectoryPoint(t=0.0, p=np.zeros(3), v=np.array([10.0, 0, 0]), a=np.zeros(3))
        windy = TrajectoryPoint(
            t=0.0, p=np.zeros(3), v=np.array([10.0, 0, 0]), a=np.zeros(3),
            w_world=np.array([3.0, 1.0, 0.0]),
        )
        np.testing.assert_array_equal(required_force(calm, 2.0), required_force(windy, 2.0))

    def test_decompose(self):
        """Parallel and perpendicular parts with the trajectory frame."""
        result = decompose(np.array([3.0, 0.0, 4.0]), E1)
        assert result.f_par == pytest.approx(3.0)
        assert result.f_perp == pytest.approx(4.0)
        assert not result.degenerate
        np.testing.assert_allclose(result.n_curve_world, E3)
        np.testing.assert_allclose(result.s_traj_world, E2)

    def test_decompose_degenerate(self):
        """A demand along the flow has no trajectory frame."""
        result = decompose(np.array([5.0, 0.0, 1e-9]), E1)
        assert result.degenerate
        assert result.n_curve_world is None

    def test_degenerate_frame_is_wings_level(self):
        """World up projected normal to the flow gives the lift axis."""
        n_curve, s_traj = degenerate_perp_frame(E1)
        np.testing.assert_allclose(n_curve, E3)
        np.testing.assert_allclose(s_traj, E2)

    def test_vertical_flow_needs_previous_attitude(self):
        """Vertical flight without history raises with the vertical-flight reason."""
        with pytest.raises(DegenerateFrameError) as excinfo:
            degenerate_perp_frame(E3)
        assert excinfo.value.reason == InfeasibleReason.VERTICAL_FLIGHT

    def test_vertical_flow_keeps_previous_span(self):
        """In vertical flight the previous span axis is kept."""
        n_curve, s_traj = degenerate_perp_frame(E3, previous_R=np.eye(3))
        np.testing.assert_allclose(s_traj, E2)
        np.testing.assert_allclose(n_curve, -E1)


class TestAttitude:
    """Tests for the body axes and bank angle."""

    @pytest.mark.parametrize("alpha", [0.0, 0.2, -0.1])
    def test_body_axes_pitch_by_alpha(self, alpha):
        """The flow seen from the body frame has angle of attack alpha."""
        R = body_axes(alpha, E1, E2, E3)
        assert angle_of_attack(R.T @ E1) == pytest.approx(alpha, abs=1e-14)
        np.testing.assert_allclose(R[:, 1], E2)

    def test_wings_level_bank(self):
        """The identity attitude in forward flow has zero bank."""
        assert bank_angle_of(np.eye(3), E1) == pytest.approx(0.0)

    def test_bank_is_positive_to_the_left(self):
        """Tilting the lift toward the left wing gives a positive bank."""
        R = so3_exp(np.array([-0.3, 0.0, 0.0]))
        assert bank_angle_of(R, E1) == pytest.approx(0.3)

    def test_bank_undefined_in_vertical_flow(self):
        """Vertical flow has no reference lift direction."""
        assert math.isnan(bank_angle_of(np.eye(3), E3))


class TestTrim:
    """Tests for the thrust and angle-of-attack solve."""

    def test_matches_root_oracle(self, glider_polar):
        """The trim alpha is the root of the balance function."""
        qS = 20.0
        trim = solve_trim(2.0, 15.0, 80.0, 0.25, glider_polar)
        expected = brentq(trim_balance(2.0, 15.0, qS, glider_polar), 0.0, 0.26, xtol=1e-14)
        assert trim.alpha == pytest.approx(expected, abs=1e-10)
        assert trim.is_feasible

    def test_both_balance_equations_hold(self, glider_polar):
        """T cos(a) and T sin(a) match the axial and normal balances."""
        qS = 20.0
        trim = solve_trim(2.0, 15.0, 80.0, 0.25, glider_polar)
        C_L, C_D = polar_eval(glider_polar, trim.alpha)
        assert trim.T * math.cos(trim.alpha) == pytest.approx(2.0 + qS * C_D, rel=1e-9)
        assert trim.T * math.sin(trim.alpha) == pytest.approx(15.0 - qS * C_L, rel=1e-9)
        assert trim.residual < 1e-10

    def test_small_angle_variant_agrees(self, glider_polar):
        """The tangent form has the same root for the small-angle polar."""
        full = solve_trim(2.0, 15.0, 80.0, 0.25, glider_polar)
        small = solve_trim_smallangle(2.0, 15.0, 80.0, 0.25, glider_polar)
        assert small.alpha == pytest.approx(full.alpha, abs=1e-10)
        assert small.T == pytest.approx(full.T, rel=1e-9)

    def test_negative_thrust_flagged(self, glider_polar):
        """A deceleration beyond the drag needs reverse thrust."""
        trim = solve_trim(-20.0, 0.0, 80.0, 0.25, glider_polar)
        assert trim.alpha == pytest.approx(0.0, abs=1e-12)
        assert trim.T == pytest.approx(-20.0 + 20.0 * 0.035)
        assert trim.infeasible == InfeasibleReason.NEGATIVE_THRUST

    def test_stall_flagged(self, glider_polar):
        """A root beyond alpha_max is returned and flagged as stall."""
        trim = solve_trim(0.0, 40.0, 80.0, 0.25, glider_polar)
        expected = brentq(trim_balance(0.0, 40.0, 20.0, glider_polar), 0.3, 0.6, xtol=1e-14)
        assert trim.alpha == pytest.approx(expected, abs=1e-9)
        assert trim.T > 0
        assert trim.infeasible == InfeasibleReason.STALL

    def test_no_trim(self, inert_polar):
        """Without aerodynamic force a cross-flow demand cannot be met."""
        with pytest.raises(TrimError) as excinfo:
            solve_trim(0.0, 10.0, 80.0, 0.25, inert_polar)
        assert excinfo.value.reason == InfeasibleReason.NO_TRIM

    def test_zero_dynamic_pressure(self, glider_polar):
        """q must be positive."""
        with pytest.raises(TrimError) as excinfo:
            solve_trim(0.0, 10.0, 0.0, 0.25, glider_polar)
        assert excinfo.value.reason == InfeasibleReason.NO_DYNAMIC_PRESSURE

    def test_unbracketed_small_angle_root(self, glider_polar):
        """Beyond the stall bracket the tangent form falls back to unbracketed Newton."""
        trim = solve_trim_smallangle(0.0, 40.0, 80.0, 0.25, glider_polar)
        k_alpha = glider_polar.k_alpha

        def tangent_form(alpha):
            axial = 20.0 * (glider_polar.C_D0 + k_alpha * alpha * alpha)
            return math.tan(alpha) * axial - (40.0 - 20.0 * glider_polar.a * alpha)

        assert trim.alpha == pytest.approx(brentq(tangent_form, 0.3, 0.6, xtol=1e-14), abs=1e-9)
        assert trim.infeasible == InfeasibleReason.STALL

    def test_newton_leaving_half_plane_is_no_trim(self, inert_polar):
        """An iterate past |alpha| = pi/2 ends the search."""
        with pytest.raises(TrimError) as excinfo:
            solve_trim(1.0, 10.0, 80.0, 0.25, inert_polar)
        assert excinfo.value.reason == InfeasibleReason.NO_TRIM

    def test_glider_needs_no_thrust(self, glider_polar):
        """A demand equal to the aerodynamic force at alpha* is met with zero thrust."""
        alpha_star, q, S = 0.08, 80.0, 0.25
        C_L, C_D = polar_eval(glider_polar, alpha_star)
        trim = solve_trim(-q * S * C_D, q * S * C_L, q, S, glider_polar)
        assert trim.alpha == pytest.approx(alpha_star, abs=1e-10)
        assert trim.T == pytest.approx(0.0, abs=1e-9)
        assert trim.is_feasible

    def test_pure_axial_demand(self, glider_polar):
        """Without a cross-flow demand the chord stays on the flow."""
        trim = solve_trim(5.0, 0.0, 80.0, 0.25, glider_polar)
        assert trim.alpha == pytest.approx(0.0, abs=1e-14)
        assert trim.T == pytest.approx(5.0 + 20.0 * glider_polar.C_D0)
        assert trim.is_feasible

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.1, 10.0))
    def test_joint_scaling_invariance(self, scale):
        """Scaling f_par, f_perp and q together keeps alpha and scales T."""
        polar = AeroPolar(a=4.3, C_D0=0.035, k=0.0711)
        base = solve_trim(2.0, 15.0, 80.0, 0.25, polar)
        scaled = solve_trim(2.0 * scale, 15.0 * scale, 80.0 * scale, 0.25, polar)
        assert scaled.alpha == pytest.approx(base.alpha, abs=1e-10)
        assert scaled.T == pytest.approx(scale * base.T, rel=1e-9)

    def test_random_instances_match_root_oracle(self):
        """1000 demands built from a known trim are recovered and agree with brentq."""
        rng = np.random.default_rng(1729)
        for _ in range(1000):
            polar = AeroPolar(
                a=rng.uniform(3.5, 6.0), C_D0=rng.uniform(0.02, 0.06), k=rng.uniform(0.03, 0.09)
            )
            alpha_star = rng.uniform(0.0, 0.25)
            T_star = rng.uniform(0.5, 60.0)
            q, S = rng.uniform(20.0, 400.0), rng.uniform(0.1, 1.0)
            qS = q * S
            C_L, C_D = polar_eval(polar, alpha_star)
            f_par = T_star * math.cos(alpha_star) - qS * C_D
            f_perp = T_star * math.sin(alpha_star) + qS * C_L

            trim = solve_trim(f_par, f_perp, q, S, polar, alpha_max=0.3)

            oracle = brentq(trim_balance(f_par, f_perp, qS, polar), -0.3, 0.3, xtol=1e-15)
            assert trim.alpha == pytest.approx(oracle, abs=1e-9)
            assert trim.alpha == pytest.approx(alpha_star, abs=1e-9)
            assert trim.T == pytest.approx(T_star, rel=1e-8)
            assert trim.is_feasible


class TestMoments:
    """Tests for required torque, moment coefficients and allocation."""

    def test_gyroscopic_torque(self):
        """tau = I w_dot + w x I w for an asymmetric body."""
        I_B = np.diag([1.0, 2.0, 3.0])
        tau = required_torque(I_B, np.array([1.0, 2.0, 0.0]), np.array([0.5, 0, 0]), np.zeros(3), np.zeros(3))
        np.testing.assert_allclose(tau, [0.5, 0.0, 2.0])

    def test_principal_spin_needs_no_torque(self):
        """Steady rotation about a principal axis is torque free."""
        tau = required_torque(np.diag([1.0, 2.0, 3.0]), np.array([0, 0, 4.0]), np.zeros(3), np.zeros(3), np.zeros(3))
        np.testing.assert_array_equal(tau, np.zeros(3))

    def test_external_and_propeller_torques_subtract(self):
        """Applied torques reduce the aerodynamic demand."""
        tau = required_torque(np.eye(3), np.zeros(3), np.zeros(3), np.array([1.0, 0, 0]), np.array([0, 2.0, 0]))
        np.testing.assert_allclose(tau, [-1.0, -2.0, 0.0])

    def test_coefficients(self):
        """zeta is divided by qSb, qS c_bar and qSb."""
        D = -0.5 * np.eye(3)
        C = moment_coefficients(np.array([1.0, 1.0, 1.0]), D, np.array([2.0, 0, 0]), 100.0, 0.5, 2.0, 0.25)
        assert C == pytest.approx((0.02, 0.08, 0.01))

    def test_coefficients_need_dynamic_pressure(self):
        """q at or below q_min raises."""
        with pytest.raises(InverseDynamicsError) as excinfo:
            moment_coefficients(np.ones(3), np.zeros((3, 3)), np.zeros(3), 0.0, 0.5, 2.0, 0.25)
        assert excinfo.value.reason == InfeasibleReason.NO_DYNAMIC_PRESSURE

    def test_square_allocation(self):
        """A well-conditioned square map is inverted exactly."""
        alloc = ControlAllocation(B_eff=np.diag([0.5, -1.0, 0.25]), u_min=-np.ones(3), u_max=np.ones(3))
        result = allocate_controls(alloc, (0.1, 0.2, 0.05), 0.0, 0.0, np.zeros(3))
        np.testing.assert_allclose(result.u, [0.2, -0.2, 0.2])
        assert not result.saturated

    def test_saturation_reported(self):
        """Deflections beyond the limits are clamped and reported."""
        alloc = ControlAllocation(B_eff=np.eye(3), u_min=-0.1 * np.ones(3), u_max=0.1 * np.ones(3))
        result = allocate_controls(alloc, (0.5, 0.05, -0.3), 0.0, 0.0, np.zeros(3))
        np.testing.assert_allclose(result.u, [0.1, 0.05, -0.1])
        assert result.saturated_axes == (0, 2)

    def test_redundant_surfaces(self):
        """Four surfaces reproduce the demand through the regularized pseudoinverse."""
        B = np.array([[1.0, -1.0, 0.0, 0.0], [0.5, 0.5, 0.0, 0.0], [0.0, 0.0, 1.0, 0.3]])
        alloc = ControlAllocation(B_eff=B, u_min=-np.ones(4), u_max=np.ones(4))
        C_req = np.array([0.1, -0.05, 0.02])
        result = allocate_controls(alloc, C_req, 0.0, 0.0, np.zeros(3))
        np.testing.assert_allclose(B @ result.u, C_req, atol=1e-6)

    def test_passive_moment_removed(self):
        """The passive coefficients are subtracted before inversion."""
        alloc = ControlAllocation(
            B_eff=np.eye(3), u_min=-np.ones(3), u_max=np.ones(3),
            C_passive=lambda alpha, beta, omega: np.array([0.0, -0.1 * alpha, 0.0]),
        )
        result = allocate_controls(alloc, (0.0, 0.0, 0.0), 0.2, 0.0, np.zeros(3))
        np.testing.assert_allclose(result.u, [0.0, 0.02, 0.0])

    def test_rank_deficient_map(self):
        """A map that cannot produce one axis is unallocatable."""
        alloc = ControlAllocation(B_eff=np.diag([1.0, 1.0, 0.0]), u_min=-np.ones(3), u_max=np.ones(3))
        with pytest.raises(InverseDynamicsError) as excinfo:
            allocate_controls(alloc, (0.1, 0.1, 0.1), 0.0, 0.0, np.zeros(3))
        assert excinfo.value.reason == InfeasibleReason.UNALLOCATABLE


class TestInvertTrajectory:
    """Tests for the full inversion pipeline."""

    def test_level_flight(self, paper5):
        """Straight level flight is wings level with constant attitude and no moments."""
        solutions = invert_trajectory(level_flight(11.7), paper5.params, paper5.polar)
        qS = 0.5 * 1.225 * 11.7 ** 2 * 0.25
        expected = solve_trim(
            0.0, 2.0 * 9.81, 0.5 * 1.225 * 11.7 ** 2, 0.25, paper5.polar,
            alpha_max=paper5.params.alpha_max,
        )
        for sol in solutions:
            assert sol.flags.is_feasible
            assert sol.alpha == pytest.approx(expected.alpha, abs=1e-10)
            assert sol.T == pytest.approx(expected.T, rel=1e-9)
            assert sol.q * 0.25 == pytest.approx(qS)
            assert sol.bank == pytest.approx(0.0, abs=1e-12)
            assert sol.beta == pytest.approx(0.0, abs=1e-12)
            np.testing.assert_allclose(sol.R, body_axes(expected.alpha, E1, E2, E3), atol=1e-9)
            np.testing.assert_allclose(sol.omega_body, 0.0, atol=1e-12)
            np.testing.assert_allclose(sol.moment_coefficients, 0.0, atol=1e-12)
            assert sol.u.size == 0

    def test_headwind_uses_airspeed(self, paper5):
        """Only the air-relative speed sets the trim."""
        calm = invert_trajectory(level_flight(11.7), paper5.params, paper5.polar)
        windy = invert_trajectory(level_flight(13.7, wind=[2.0, 0.0, 0.0]), paper5.params, paper5.polar)
        assert windy[0].alpha == pytest.approx(calm[0].alpha, abs=1e-12)
        assert windy[0].T == pytest.approx(calm[0].T, rel=1e-9)

    def test_hover_is_regularized(self, paper5):
        """Zero airspeed points the thrust axis along the required force."""
        solutions = invert_trajectory(level_flight(0.0), paper5.params, paper5.polar)
        for sol in solutions:
            assert sol.flags.regularized_airspeed
            assert sol.alpha == 0.0
            assert sol.T == pytest.approx(2.0 * 9.81)
            np.testing.assert_allclose(sol.R[:, 0], E3, atol=1e-12)

    def test_stall_flagged_not_raised(self, paper5):
        """A slow pass that needs too much alpha is flagged per sample."""
        solutions = invert_trajectory(level_flight(6.0), paper5.params, paper5.polar)
        assert all(InfeasibleReason.STALL in sol.flags.infeasible for sol in solutions)
        assert "infeasible:stall" in solutions[0].flags.to_text()

    def test_tethered_parallel_with_sampler(self, tethered_orbit, paper5):
        """Sampled parallel flight reproduces the closed-form attitude, rates and bank."""
        s = tethered_orbit
        trim = implicit_trim(s, paper5.polar, paper5.params)
        sampler = attitude_sampler(s, trim.alpha)
        samples = [parallel_state(s, t) for t in np.linspace(0.0, 2.0, 5)]
        options = InversionOptions(g=s.g, attitude_sampler=sampler)

        solutions = invert_trajectory(samples, paper5.params, paper5.polar, options=options)

        mu = bank_angle(s).mu
        for sol in solutions:
            assert sol.flags.is_feasible
            assert sol.alpha == pytest.approx(trim.alpha, abs=1e-9)
            assert sol.T == pytest.approx(trim.T, rel=1e-9)
            np.testing.assert_allclose(sol.R, sampler(sol.t), atol=1e-9)
            omega = constant_rates(s, sol.R).omega_body
            np.testing.assert_allclose(sol.omega_body, omega, atol=1e-6)
            np.testing.assert_allclose(sol.omega_dot_body, 0.0, atol=1e-5)
            assert sol.bank == pytest.approx(mu, abs=1e-9)

    def test_tethered_moment_coefficients(self, tethered_orbit, paper5):
        """Steady turning needs only the gyroscopic moment."""
        s = tethered_orbit
        params = paper5.params
        trim = implicit_trim(s, paper5.polar, params)
        options = InversionOptions(g=s.g, attitude_sampler=attitude_sampler(s, trim.alpha))
        samples = [parallel_state(s, t) for t in (0.0, 0.5, 1.0)]

        sol = invert_trajectory(samples, params, paper5.polar, options=options)[1]

        omega = constant_rates(s, sol.R).omega_body
        zeta = np.cross(omega, params.I_B @ omega)
        qS = s.q * params.S
        expected = zeta / (qS * np.array([params.b, params.c_bar, params.b]))
        np.testing.assert_allclose(sol.moment_coefficients, expected, atol=1e-6)

    def test_tethered_parallel_sampled_rates(self, tethered_orbit, paper5):
        """Differencing dense attitude samples recovers the constant rate."""
        s = tethered_orbit
        samples = [parallel_state(s, t) for t in np.arange(0.0, 1.0 + 1e-9, 0.01)]
        solutions = invert_trajectory(samples, paper5.params, paper5.polar, options=InversionOptions(g=s.g))
        for sol in solutions:
            np.testing.assert_allclose(sol.omega_body, constant_rates(s, sol.R).omega_body, atol=1e-3)

    def test_saturation_flag(self, tethered_orbit, paper5):
        """Weak surfaces saturate and the sample is flagged."""
        s = tethered_orbit
        trim = implicit_trim(s, paper5.polar, paper5.params)
        alloc = ControlAllocation(B_eff=1e-9 * np.eye(3), u_min=-0.1 * np.ones(3), u_max=0.1 * np.ones(3))
        options = InversionOptions(g=s.g, attitude_sampler=attitude_sampler(s, trim.alpha))
        samples = [parallel_state(s, t) for t in (0.0, 0.5, 1.0)]

        solutions = invert_trajectory(samples, paper5.params, paper5.polar, alloc=alloc, options=options)

        assert all(InfeasibleReason.SATURATION in sol.flags.infeasible for sol in solutions)
        assert all(np.all(np.abs(sol.u) <= 0.1) for sol in solutions)

    def test_control_coupling_lowers_alpha(self, paper5):
        """Extra lift from the surfaces reduces the trim angle of attack."""
        alloc = ControlAllocation(
            B_eff=np.eye(3), u_min=-0.5 * np.ones(3), u_max=0.5 * np.ones(3),
            force_coupling=lambda alpha, u: (0.05, 0.0),
        )
        plain = invert_trajectory(level_flight(11.7), paper5.params, paper5.polar, alloc=alloc)
        coupled = invert_trajectory(
            level_flight(11.7), paper5.params, paper5.polar, alloc=alloc,
            options=InversionOptions(couple_controls=True),
        )
        assert coupled[0].alpha < plain[0].alpha
        assert coupled[0].alpha == pytest.approx(plain[0].alpha - 0.05 / paper5.polar.a, abs=2e-3)

    def test_too_few_samples(self, paper5):
        """Two samples cannot be differentiated."""
        with pytest.raises(InverseDynamicsError, match="at least 3"):
            invert_trajectory(level_flight(11.7, n=2), paper5.params, paper5.polar)

    def test_times_must_increase(self, paper5):
        """Repeated times are rejected."""
        samples = level_flight(11.7, n=3)
        samples[2] = samples[1]
        with pytest.raises(InverseDynamicsError, match="strictly increasing"):
            invert_trajectory(samples, paper5.params, paper5.polar)

    def test_force_closure(self, tethered_orbit, paper5):
        """Thrust along the chord plus the aerodynamic force rebuild F_req."""
        s = tethered_orbit
        samples = [parallel_state(s, t) for t in np.linspace(0.0, 1.0, 5)]
        solutions = invert_trajectory(samples, paper5.params, paper5.polar, options=InversionOptions(g=s.g))
        for sol in solutions:
            C_L, C_D = polar_eval(paper5.polar, sol.alpha)
            dirs = aero_directions(sol.R.T @ sol.e_a_world)
            aero = aero_force_world(sol.R, aero_force_body(sol.q, paper5.params.S, C_D, C_L, 0.0, dirs))
            total = sol.R @ (sol.T * E1) + aero
            np.testing.assert_allclose(total, sol.F_req_world, atol=1e-8 * np.linalg.norm(sol.F_req_world))

    def test_torque_closure(self, tethered_orbit, paper5):
        """The moment from the coefficients and damping equals the required torque."""
        s = tethered_orbit
        params = replace(paper5.params, D_omega=-0.01 * np.eye(3))
        trim = implicit_trim(s, paper5.polar, params)
        options = InversionOptions(g=s.g, attitude_sampler=attitude_sampler(s, trim.alpha))
        samples = [parallel_state(s, t) for t in (0.0, 0.5, 1.0)]

        for sol in invert_trajectory(samples, params, paper5.polar, options=options):
            moment = aero_moment_body(
                sol.q, params.S, params.b, params.c_bar, sol.C_l, sol.C_m, sol.C_n,
                params.D_omega, sol.omega_body,
            )
            tau_req = required_torque(params.I_B, sol.omega_body, sol.omega_dot_body, np.zeros(3), np.zeros(3))
            assert np.linalg.norm(sol.omega_body) > 0.1
            np.testing.assert_allclose(moment, tau_req, atol=1e-12)

    def test_steady_glide_needs_no_thrust(self, paper5):
        """Gliding down at tan(gamma) = -C_D/C_L is trimmed at alpha* without thrust."""
        params, polar = paper5.params, paper5.polar
        alpha_star = 0.08
        C_L, C_D = polar_eval(polar, alpha_star)
        gamma = -math.atan(C_D / C_L)
        q = params.m * 9.81 * math.cos(gamma) / (params.S * C_L)
        v = math.sqrt(2.0 * q / params.rho) * np.array([math.cos(gamma), 0.0, math.sin(gamma)])
        samples = [
            TrajectoryPoint(t=0.1 * i, p=np.array([0.0, 0.0, 100.0]) + 0.1 * i * v, v=v, a=np.zeros(3))
            for i in range(5)
        ]

        solutions = invert_trajectory(samples, params, polar, options=InversionOptions(g=9.81))

        for sol in solutions:
            assert sol.alpha == pytest.approx(alpha_star, abs=1e-9)
            assert sol.T == pytest.approx(0.0, abs=1e-8)
            assert sol.flags.is_feasible

    def test_degenerate_demand_mid_sweep(self, paper5):
        """A climb straight up after level flight keeps the previous span and stays feasible."""
        samples = level_flight(11.7, n=3)
        samples.append(TrajectoryPoint(
            t=0.3, p=np.array([3.51, 0.0, 50.0]), v=np.array([0.0, 0.0, 11.7]), a=np.zeros(3),
        ))

        solutions = invert_trajectory(samples, paper5.params, paper5.polar)

        climb = solutions[-1]
        assert not any(sol.flags.degenerate_perp for sol in solutions[:-1])
        assert climb.flags.degenerate_perp
        assert climb.flags.is_feasible
        assert climb.alpha == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_allclose(climb.R[:, 0], E3, atol=1e-12)
        np.testing.assert_allclose(climb.R[:, 1], E2, atol=1e-12)
        assert climb.T == pytest.approx(2.0 * 9.81 + climb.q * paper5.params.S * paper5.polar.C_D0)

    def test_vertical_start_keeps_later_rates(self, paper5):
        """A failed first sample does not leak NaN into its neighbours."""
        samples = level_flight(11.7, n=6)
        samples[0] = TrajectoryPoint(
            t=0.0, p=np.array([0.0, 0.0, 48.83]), v=np.array([0.0, 0.0, 11.7]), a=np.zeros(3),
        )

        solutions = invert_trajectory(samples, paper5.params, paper5.polar)

        assert InfeasibleReason.VERTICAL_FLIGHT in solutions[0].flags.infeasible
        for sol in solutions[1:]:
            assert sol.flags.to_text() == "ok"
            np.testing.assert_allclose(sol.omega_body, 0.0, atol=1e-12)
            np.testing.assert_allclose(sol.omega_dot_body, 0.0, atol=1e-12)
            np.testing.assert_allclose(sol.moment_coefficients, 0.0, atol=1e-12)

    def test_isolated_attitude_flags_undefined_rates(self, paper5, inert_polar):
        """A finite attitude between two failed samples cannot be differenced."""
        moving = np.array([5.0, 0.0, 0.0])
        velocities = [moving, np.zeros(3), moving, np.zeros(3), np.zeros(3), np.zeros(3)]
        samples = [
            TrajectoryPoint(t=0.1 * i, p=np.array([0.0, 0.0, 50.0]), v=v, a=np.zeros(3))
            for i, v in enumerate(velocities)
        ]

        solutions = invert_trajectory(samples, paper5.params, inert_polar)

        assert all(InfeasibleReason.NO_TRIM in solutions[i].flags.infeasible for i in (0, 2))
        isolated = solutions[1]
        assert isolated.flags.regularized_airspeed
        assert InfeasibleReason.RATES_UNDEFINED in isolated.flags.infeasible
        assert np.all(np.isnan(isolated.omega_body))
        for sol in solutions[3:]:
            assert sol.flags.is_feasible
            np.testing.assert_allclose(sol.omega_body, 0.0, atol=1e-12)


class TestGravitySetting:
    """Tests for the configured gravity."""

    @pytest.fixture
    def low_gravity(self, tmp_path, monkeypatch):
        """Solver settings with g = 3.71 m/s^2."""
        config = tmp_path / "solver_config.yaml"
        config.write_text("gravity: 3.71\n")
        monkeypatch.setattr("src.engine.settings._settings_instance", load_settings(str(config)))

    def test_required_force_default(self, low_gravity):
        """Without an explicit g the configured value is used."""
        pt = TrajectoryPoint(t=0.0, p=np.zeros(3), v=np.array([10.0, 0, 0]), a=np.zeros(3))
        np.testing.assert_allclose(required_force(pt, 2.0), [0.0, 0.0, 7.42])
        np.testing.assert_allclose(required_force(pt, 2.0, 9.81), [0.0, 0.0, 19.62])

    def test_inversion_default(self, low_gravity, paper5):
        """invert_trajectory picks up the configured gravity when options.g is unset."""
        solutions = invert_trajectory(level_flight(11.7), paper5.params, paper5.polar)
        np.testing.assert_allclose(solutions[0].F_req_world, [0.0, 0.0, 2.0 * 3.71])
