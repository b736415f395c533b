"""Tests for tethered flight on a spherical parallel."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import brentq

from src.engine import (
    analytic_solution,
    attitude_sampler,
    bank_angle,
    bank_angle_dimensionless,
    cardano_alpha,
    cardano_trim,
    classify_regime,
    constant_rates,
    demand,
    implicit_trim,
    induced_drag_of_lift,
    parallel_state,
    perceived_bank_offset,
    sensitivities_at_locus,
    specific_force,
    tension_sweep,
    zero_bank_eta,
    zero_bank_tension,
)
from src.models import BankRegime, TetherScenario, TetherScenarioError


THETA_60 = math.radians(60.0)
KAPPA = 0.6977


class TestScenario:
    """Tests for the derived quantities of a parallel."""

    def test_geometry(self, free_orbit):
        """Colatitude, height, turn rate and period of the reference circle."""
        assert free_orbit.theta_deg == pytest.approx(68.0025, abs=1e-4)
        assert free_orbit.z0 == pytest.approx(7.4913, abs=1e-4)
        assert free_orbit.r == pytest.approx(18.544)
        assert free_orbit.omega_cir == pytest.approx(0.630932, abs=1e-6)
        assert free_orbit.period == pytest.approx(9.95858, abs=1e-5)
        assert free_orbit.kappa == pytest.approx(KAPPA, abs=1e-4)

    def test_trajectory_stays_on_the_sphere(self, tethered_orbit):
        """|p| = L, v is tangent and the acceleration is centripetal."""
        for t in np.linspace(0.0, 10.0, 7):
            pt = parallel_state(tethered_orbit, t)
            assert np.linalg.norm(pt.p) == pytest.approx(20.0)
            assert pt.p[2] == pytest.approx(tethered_orbit.z0)
            assert pt.v @ pt.p == pytest.approx(0.0, abs=1e-9)
            assert np.linalg.norm(pt.a) == pytest.approx(11.7 ** 2 / 18.544)
            np.testing.assert_allclose(pt.f_ext_world, -16.0 * pt.p / 20.0)

    def test_motion_is_counter_clockwise(self, free_orbit):
        """The azimuth grows with time."""
        pt = parallel_state(free_orbit, 0.0)
        assert np.cross(pt.p, pt.v)[2] > 0

    @pytest.mark.parametrize("theta", [0.0, -0.1, math.pi / 2 + 0.01])
    def test_colatitude_domain(self, theta):
        """Colatitude must lie in (0, 90] degrees."""
        with pytest.raises(TetherScenarioError):
            TetherScenario(L=20.0, theta=theta, v0=10.0)

    def test_radius_beyond_tether(self):
        """r > L is rejected."""
        with pytest.raises(TetherScenarioError):
            TetherScenario.from_radius(20.0, 21.0, 10.0)


class TestDemand:
    """Tests for the constant force demand."""

    def test_free_flight_components(self, free_orbit):
        """Without tension the demand is centripetal plus weight."""
        components = demand(free_orbit, 0.0)
        assert components.A_h == pytest.approx(-14.76381, abs=1e-5)
        assert components.A_z == pytest.approx(19.62)

    def test_tethered_components(self, tethered_orbit):
        """At 16 N the horizontal demand has turned outward."""
        components = demand(tethered_orbit, 0.0)
        assert components.A_h == pytest.approx(0.07139, abs=1e-5)
        assert components.A_z == pytest.approx(25.61307, abs=1e-5)

    def test_matches_required_force(self, tethered_orbit):
        """F_req built from the sampled motion equals A_h u + A_z e3."""
        from src.engine import required_force

        pt = parallel_state(tethered_orbit, 1.7)
        components = demand(tethered_orbit, tethered_orbit.psi0 + tethered_orbit.omega_cir * 1.7)
        np.testing.assert_allclose(
            required_force(pt, 2.0, 9.81), components.f_perp * components.n_curve_world, atol=1e-12
        )

    def test_trajectory_frame(self, tethered_orbit):
        """(e_t, s, n_curve) is right-handed and orthonormal."""
        psi = 0.4
        components = demand(tethered_orbit, psi)
        e_t = np.array([-math.sin(psi), math.cos(psi), 0.0])
        frame = np.column_stack([e_t, components.s_world, components.n_curve_world])
        np.testing.assert_allclose(frame.T @ frame, np.eye(3), atol=1e-14)
        assert np.linalg.det(frame) == pytest.approx(1.0)


class TestTrim:
    """Tests for the implicit and closed-form trims."""

    def test_cardano_root(self):
        """The closed form solves the depressed cubic."""
        k_alpha, C_D0, a, rhs = 1.3137, 0.035, 4.3, 1.2205
        expected = brentq(lambda x: k_alpha * x ** 3 + (C_D0 + a) * x - rhs, 0.0, 1.0, xtol=1e-15)
        assert cardano_alpha(k_alpha, C_D0, a, rhs) == pytest.approx(expected, abs=1e-12)

    def test_cardano_negative_demand(self):
        """An odd cubic gives an odd root."""
        assert cardano_alpha(1.3, 0.035, 4.3, -0.5) == pytest.approx(-cardano_alpha(1.3, 0.035, 4.3, 0.5))

    def test_cardano_matches_root_oracle(self):
        """1000 random cubics agree with a bracketed root to 1e-12."""
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            k_alpha = rng.uniform(0.5, 2.0)
            C_D0 = rng.uniform(0.02, 0.05)
            a = rng.uniform(4.0, 5.5)
            rhs = rng.uniform(0.01, 3.0)
            expected = brentq(
                lambda x: k_alpha * x ** 3 + (C_D0 + a) * x - rhs, 0.0, rhs / (C_D0 + a), xtol=1e-15
            )
            assert abs(cardano_alpha(k_alpha, C_D0, a, rhs) - expected) <= 1e-12

    def test_cardano_small_demand_keeps_precision(self):
        """A tiny right-hand side gives the linear root to full relative precision."""
        alpha = cardano_alpha(1.3, 0.035, 4.3, 1e-12)
        assert alpha == pytest.approx(1e-12 / 4.335, rel=1e-13)
        assert cardano_alpha(1.3, 0.035, 4.3, 0.0) == 0.0

    def test_cardano_rejects_bad_coefficients(self):
        """k_alpha must be positive."""
        with pytest.raises(ValueError):
            cardano_alpha(0.0, 0.035, 4.3, 1.0)

    def test_zero_bank_trim(self, zero_bank_orbit, paper5):
        """The wings-level reference trims near 15.77 deg."""
        trim = cardano_trim(zero_bank_orbit, paper5.polar, paper5.params)
        assert math.degrees(trim.alpha) == pytest.approx(15.770, abs=2e-3)
        assert trim.T == pytest.approx(2.93006, abs=1e-4)
        assert trim.residual < 1e-12

    def test_implicit_close_to_cardano(self, zero_bank_orbit, paper5):
        """The small-angle cubic stays within 0.02 deg of the full trim."""
        full = implicit_trim(zero_bank_orbit, paper5.polar, paper5.params)
        cubic = cardano_trim(zero_bank_orbit, paper5.polar, paper5.params)
        assert math.degrees(full.alpha) == pytest.approx(15.7581, abs=1e-3)
        assert abs(math.degrees(full.alpha - cubic.alpha)) < 0.02
        assert full.is_feasible

    @pytest.mark.parametrize("F_ext,alpha_deg", [(0.0, 15.1509), (10.0, 14.8242), (16.0, 15.7751)])
    def test_trim_over_tension(self, free_orbit, paper5, F_ext, alpha_deg):
        """Angle of attack across the tension range."""
        trim = implicit_trim(free_orbit.with_tension(F_ext), paper5.polar, paper5.params)
        assert math.degrees(trim.alpha) == pytest.approx(alpha_deg, abs=1e-3)

    def test_area_from_argument(self, zero_bank_orbit, paper5):
        """S may be passed without aircraft parameters."""
        with_params = implicit_trim(zero_bank_orbit, paper5.polar, paper5.params)
        with_area = implicit_trim(zero_bank_orbit, paper5.polar, S=0.25)
        assert with_area.alpha == pytest.approx(with_params.alpha)

    def test_needs_area(self, zero_bank_orbit, paper5):
        """Neither params nor S is an error."""
        with pytest.raises(ValueError):
            cardano_trim(zero_bank_orbit, paper5.polar)


class TestBankAngle:
    """Tests for the equilibrium bank angle and its regimes."""

    def test_classical_turn(self, free_orbit):
        """Without tension the bank is atan(v^2 / (g r))."""
        result = bank_angle(free_orbit)
        assert result.mu_deg == pytest.approx(36.961, abs=1e-3)
        assert result.mu == pytest.approx(math.atan(11.7 ** 2 / (9.81 * 18.544)))
        assert result.regime == BankRegime.INWARD

    def test_sixteen_newton_tension(self, tethered_orbit):
        """16 N slightly overshoots the wings-level tension."""
        result = bank_angle(tethered_orbit)
        assert result.mu_deg == pytest.approx(-0.1597, abs=1e-3)
        assert result.regime == BankRegime.OUTWARD

    def test_dimensionless_form_agrees(self, free_orbit):
        """The kappa, eta, theta form matches the dimensional bank."""
        for F_ext in (0.0, 6.0, 12.0, 16.0):
            s = free_orbit.with_tension(F_ext)
            assert bank_angle_dimensionless(s.kappa, s.eta, s.theta) == pytest.approx(
                bank_angle(s).mu, abs=1e-12
            )

    def test_bank_decreases_with_tension(self, free_orbit):
        """More tension always banks less inward."""
        banks = [bank_angle(free_orbit.with_tension(F)).mu for F in np.arange(0.0, 30.0, 2.0)]
        assert all(b1 > b2 for b1, b2 in zip(banks, banks[1:]))

    def test_large_tension_limit(self):
        """As eta grows the bank tends to -atan(tan(theta))."""
        mu = bank_angle_dimensionless(KAPPA, 1e6, THETA_60)
        assert mu == pytest.approx(-THETA_60, abs=1e-5)

    def test_inverted_regime(self):
        """1 + eta cos(theta) <= 0 raises."""
        with pytest.raises(TetherScenarioError, match="inverted"):
            bank_angle_dimensionless(KAPPA, -3.0, THETA_60)

    def test_inverted_scenario(self, free_orbit):
        """A negative vertical demand raises for dimensional scenarios too."""
        with pytest.raises(TetherScenarioError, match="inverted"):
            bank_angle(free_orbit.with_tension(-100.0))

    def test_zero_bank_tension(self, free_orbit, zero_bank_orbit):
        """F* = m v^2 L / r^2 levels the wings."""
        assert zero_bank_tension(free_orbit) == pytest.approx(15.923, abs=1e-3)
        result = bank_angle(zero_bank_orbit)
        assert result.mu == pytest.approx(0.0, abs=1e-12)
        assert result.regime == BankRegime.ZERO_BANK

    def test_zero_bank_eta(self, free_orbit):
        """eta* = kappa / sin^2(theta) is the dimensionless F*."""
        eta_star = zero_bank_eta(free_orbit.kappa, free_orbit.theta)
        assert eta_star * free_orbit.m * free_orbit.g == pytest.approx(zero_bank_tension(free_orbit))
        assert eta_star == pytest.approx(0.81157, abs=1e-5)

    @given(st.floats(0.05, 3.0), st.floats(0.1, math.pi / 2))
    def test_locus_levels_the_wings(self, kappa, theta):
        """The bank vanishes on the zero-bank locus."""
        assert bank_angle_dimensionless(kappa, zero_bank_eta(kappa, theta), theta) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("eta,expected", [
        (0.5, BankRegime.INWARD),
        (1.5, BankRegime.OUTWARD),
    ])
    def test_regime_classification(self, eta, expected):
        """Below the locus the aircraft banks inward, above it outward."""
        assert classify_regime(KAPPA, eta, THETA_60) == expected

    def test_regime_band_is_relative(self):
        """A point within the relative tolerance counts as zero bank."""
        eta_star = zero_bank_eta(KAPPA, THETA_60)
        assert classify_regime(KAPPA, eta_star * (1 + 1e-12), THETA_60) == BankRegime.ZERO_BANK
        assert classify_regime(KAPPA, eta_star * 1.01, THETA_60, tol=0.05) == BankRegime.ZERO_BANK


class TestSensitivities:
    """Tests for the partials of mu on the zero-bank locus."""

    def test_reference_values(self):
        """Closed forms at kappa = 0.6977, theta = 60 deg."""
        report = sensitivities_at_locus(KAPPA, THETA_60, L=20.0)
        assert report.eta_star == pytest.approx(0.930267, abs=1e-5)
        assert report.denominator == pytest.approx(1.465133, abs=1e-5)
        assert report.d_mu_d_eta == pytest.approx(-0.591090, abs=1e-5)
        assert report.d_mu_d_kappa == pytest.approx(0.788120, abs=1e-5)
        assert report.d_mu_d_theta == pytest.approx(-0.634937, abs=1e-5)
        assert report.d_mu_d_L == pytest.approx(-0.027494, abs=1e-5)
        assert report.signs() == (-1, 1, -1, -1)

    def test_length_partial_needs_length(self):
        """Without L the length partial is NaN."""
        assert math.isnan(sensitivities_at_locus(KAPPA, THETA_60).d_mu_d_L)

    @pytest.mark.parametrize("theta_deg", [30.0, 60.0, 85.0])
    def test_partials_match_finite_differences(self, theta_deg):
        """Central differences of the dimensionless bank agree with the closed forms."""
        theta = math.radians(theta_deg)
        eta = zero_bank_eta(KAPPA, theta)
        report = sensitivities_at_locus(KAPPA, theta)
        h = 1e-6

        d_eta = (bank_angle_dimensionless(KAPPA, eta + h, theta) - bank_angle_dimensionless(KAPPA, eta - h, theta)) / (2 * h)
        d_kappa = (bank_angle_dimensionless(KAPPA + h, eta, theta) - bank_angle_dimensionless(KAPPA - h, eta, theta)) / (2 * h)
        d_theta = (bank_angle_dimensionless(KAPPA, eta, theta + h) - bank_angle_dimensionless(KAPPA, eta, theta - h)) / (2 * h)

        assert d_eta == pytest.approx(report.d_mu_d_eta, rel=1e-6)
        assert d_kappa == pytest.approx(report.d_mu_d_kappa, rel=1e-6)
        assert d_theta == pytest.approx(report.d_mu_d_theta, rel=1e-6)

    @pytest.mark.parametrize("kappa", np.linspace(0.1, 3.0, 10).tolist())
    @pytest.mark.parametrize("theta_deg", np.linspace(15.0, 85.0, 7).tolist())
    def test_partials_over_locus_grid(self, theta_deg, kappa):
        """Closed forms match central differences (h = 1e-6) across the locus."""
        theta = math.radians(theta_deg)
        L, g, h = 20.0, 9.81, 1e-6
        eta = zero_bank_eta(kappa, theta)
        report = sensitivities_at_locus(kappa, theta, L=L)
        v0_sq = kappa * g * L

        def mu(dk=0.0, de=0.0, dt=0.0):
            return bank_angle_dimensionless(kappa + dk, eta + de, theta + dt)

        def mu_of_length(length):
            return bank_angle_dimensionless(v0_sq / (g * length), eta, theta)

        d_eta = (mu(de=h) - mu(de=-h)) / (2 * h)
        d_kappa = (mu(dk=h) - mu(dk=-h)) / (2 * h)
        d_theta = (mu(dt=h) - mu(dt=-h)) / (2 * h)
        d_L = (mu_of_length(L + h) - mu_of_length(L - h)) / (2 * h)

        assert d_eta == pytest.approx(report.d_mu_d_eta, rel=1e-5)
        assert d_kappa == pytest.approx(report.d_mu_d_kappa, rel=1e-5)
        assert d_theta == pytest.approx(report.d_mu_d_theta, rel=1e-5)
        assert d_L == pytest.approx(report.d_mu_d_L, rel=1e-5)
        assert report.signs() == (-1, 1, -1, -1)

    def test_length_partial_matches_scenario(self):
        """Lengthening the tether at fixed speed and tension lowers kappa only."""
        L, h = 20.0, 1e-5
        report = sensitivities_at_locus(0.6977, THETA_60, L=L)
        v0 = math.sqrt(0.6977 * 9.81 * L)
        eta = report.eta_star

        def mu(length):
            kappa = v0 ** 2 / (9.81 * length)
            return bank_angle_dimensionless(kappa, eta, THETA_60)

        assert (mu(L + h) - mu(L - h)) / (2 * h) == pytest.approx(report.d_mu_d_L, rel=1e-5)


class TestLoads:
    """Tests for induced drag and the on-board specific force."""

    def test_induced_drag(self, paper5):
        """D = qS C_D0 + F_L^2 k_alpha / (qS a^2)."""
        q, S = 83.845, 0.25
        F_L = q * S * paper5.polar.a * 0.2
        expected = q * S * paper5.polar.drag(0.2)
        assert induced_drag_of_lift(F_L, q, S, paper5.polar) == pytest.approx(expected)

    def test_induced_drag_needs_pressure(self, paper5):
        """q must be positive."""
        with pytest.raises(ValueError):
            induced_drag_of_lift(10.0, 0.0, 0.25, paper5.polar)

    def test_zero_bank_specific_force(self, zero_bank_orbit, paper5):
        """Wings level on the parallel, the accelerometer reads v^2/r sideways and g cos(alpha) up."""
        solution = analytic_solution(zero_bank_orbit, paper5.polar, paper5.params)
        pt = parallel_state(zero_bank_orbit, 0.0)
        f = specific_force(solution.R, pt.a, np.array([0.0, 0.0, -9.81]))
        assert f[1] == pytest.approx(11.7 ** 2 / 18.544, rel=1e-9)
        assert f[2] == pytest.approx(9.81 * math.cos(solution.alpha), rel=1e-9)
        assert perceived_bank_offset(f) == pytest.approx(
            math.atan2(11.7 ** 2 / 18.544, 9.81 * math.cos(solution.alpha)), abs=1e-9
        )

    def test_level_hover_has_no_offset(self):
        """A reading along the body normal has zero roll offset."""
        assert perceived_bank_offset(np.array([0.0, 0.0, 9.81])) == 0.0


class TestClosedForm:
    """Tests for the closed-form attitude."""

    def test_attitude_is_rotation(self, tethered_orbit, paper5):
        """The sampled attitude is orthonormal with det +1 along the orbit."""
        trim = implicit_trim(tethered_orbit, paper5.polar, paper5.params)
        sampler = attitude_sampler(tethered_orbit, trim.alpha)
        for t in np.linspace(0.0, tethered_orbit.period, 9):
            R = sampler(t)
            np.testing.assert_allclose(R.T @ R, np.eye(3), atol=1e-14)
            assert np.linalg.det(R) == pytest.approx(1.0)

    def test_periodic(self, tethered_orbit, paper5):
        """After one period the attitude repeats."""
        sampler = attitude_sampler(tethered_orbit, 0.27)
        np.testing.assert_allclose(sampler(tethered_orbit.period), sampler(0.0), atol=1e-12)

    def test_body_rate_is_constant_turn(self, tethered_orbit, paper5):
        """R omega_B equals omega_cir e3 and has the turn-rate magnitude."""
        solution = analytic_solution(tethered_orbit, paper5.polar, paper5.params, t=2.5)
        np.testing.assert_allclose(solution.R @ solution.omega_body, [0.0, 0.0, tethered_orbit.omega_cir], atol=1e-14)
        assert constant_rates(tethered_orbit, solution.R).omega_dot_body.tolist() == [0.0, 0.0, 0.0]

    def test_bank_matches_bank_angle(self, tethered_orbit, paper5):
        """The closed-form solution reports the equilibrium bank."""
        solution = analytic_solution(tethered_orbit, paper5.polar, paper5.params)
        assert solution.mu == pytest.approx(bank_angle(tethered_orbit).mu)


class TestTensionSweep:
    """Tests for sweeping the tether tension."""

    def test_rows_in_input_order(self, free_orbit, paper5):
        """One row per tension, monotone bank and a near-level last row."""
        tensions = [10.0, 11.5, 13.0, 14.5, 16.0]
        rows = tension_sweep(free_orbit, paper5.polar, paper5.params, tensions)
        assert [row.F_ext for row in rows] == tensions
        assert all(a.mu_deg > b.mu_deg for a, b in zip(rows, rows[1:]))
        assert abs(rows[-1].mu_deg) < 1.0
        assert all(row.feasible for row in rows)
        assert rows[0].alpha_deg == pytest.approx(14.8242, abs=1e-3)
        assert rows[0].F_ext_zero_bank == pytest.approx(15.923, abs=1e-3)

    def test_row_dict(self, free_orbit, paper5):
        """The serialized row uses the regime label."""
        row = tension_sweep(free_orbit, paper5.polar, paper5.params, [0.0])[0].to_dict()
        assert row["regime"] == "Inward"
        assert set(row) == {
            "F_ext", "mu_deg", "alpha_deg", "T", "omega_cir", "regime", "F_ext_zero_bank", "feasible", "reason",
        }

    def test_stalled_row_is_flagged(self, free_orbit, paper5):
        """A trim beyond the stall bound marks the row infeasible."""
        from dataclasses import replace

        params = replace(paper5.params, alpha_max=math.radians(5.0))
        row = tension_sweep(free_orbit, paper5.polar, params, [10.0])[0]
        assert not row.feasible
        assert row.reason == "stall"
