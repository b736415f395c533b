"""Tethered flight on a spherical parallel."""

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from .errors import ModelValidationError
from .frames import Rot3, Vec3Body, Vec3World
from .trajectory import TrimPair


class TetherScenarioError(ModelValidationError):
    """Exception raised for tether scenarios outside the supported domain."""
    pass


class BankRegime(Enum):
    """Sign of the equilibrium bank angle."""
    INWARD = "Inward"        # centrifugal demand dominates
    ZERO_BANK = "ZeroBank"   # tether cancels the centrifugal demand
    OUTWARD = "Outward"      # tether pull dominates


@dataclass(frozen=True)
class TetherScenario:
    """
    Steady flight on a circle of colatitude theta around the tether anchor.

    The anchor sits at the world origin; the aircraft flies counter-clockwise
    seen from above at constant speed v0.
    """

    L: float                 # m tether length
    theta: float             # rad colatitude, (0, pi/2]
    v0: float                # m/s tangential speed
    F_ext: float = 0.0       # N tether tension
    m: float = 2.0           # kg
    g: float = 9.81          # m/s^2
    rho: float = 1.225       # kg/m^3
    psi0: float = 0.0        # rad azimuth at t = 0

    def __post_init__(self):
        if not (math.isfinite(self.theta) and 0.0 < self.theta <= math.pi / 2):
            raise TetherScenarioError(
                f"colatitude must lie in (0, 90] deg, got {math.degrees(self.theta):.6g} deg"
            )
        for name in ("L", "v0", "m", "g", "rho"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise TetherScenarioError(f"{name} must be positive, got {value}")
        if not (math.isfinite(self.F_ext) and math.isfinite(self.psi0)):
            raise TetherScenarioError("F_ext and psi0 must be finite")

    @classmethod
    def from_radius(cls, L: float, r: float, v0: float, **kwargs) -> "TetherScenario":
        """Build the scenario from the circle radius instead of the colatitude."""
        if not (0.0 < r <= L):
            raise TetherScenarioError(f"radius must lie in (0, L], got r={r}, L={L}")
        return cls(L=L, theta=math.asin(r / L), v0=v0, **kwargs)

    def with_tension(self, F_ext: float) -> "TetherScenario":
        """Copy with a different tether tension."""
        return replace(self, F_ext=F_ext)

    @property
    def r(self) -> float:
        """Circle radius L sin(theta), m."""
        return self.L * math.sin(self.theta)

    @property
    def z0(self) -> float:
        """Circle height L cos(theta), m."""
        return self.L * math.cos(self.theta)

    @property
    def omega_cir(self) -> float:
        """Turn rate v0 / r, rad/s."""
        return self.v0 / self.r

    @property
    def period(self) -> float:
        """Time for one orbit, s."""
        return 2.0 * math.pi / self.omega_cir

    @property
    def kappa(self) -> float:
        """Dimensionless speed squared v0^2 / (g L)."""
        return self.v0 ** 2 / (self.g * self.L)

    @property
    def eta(self) -> float:
        """Tension normalized by weight."""
        return self.F_ext / (self.m * self.g)

    @property
    def q(self) -> float:
        """Dynamic pressure 0.5 rho v0^2, Pa."""
        return 0.5 * self.rho * self.v0 ** 2

    @property
    def latitude(self) -> float:
        """Elevation of the tether above the horizon, rad."""
        return math.pi / 2 - self.theta

    @property
    def theta_deg(self) -> float:
        return math.degrees(self.theta)


@dataclass(frozen=True, eq=False)
class DemandComponents:
    """Constant horizontal and vertical force demand on the parallel."""

    A_h: float               # N, along u_rxy (outward positive)
    A_z: float               # N, along e3
    f_perp: float            # N
    n_curve_world: Vec3World
    s_world: Vec3World

    @property
    def A_h_in(self) -> float:
        """Inward horizontal demand."""
        return -self.A_h


@dataclass(frozen=True)
class BankResult:
    """Signed bank angle and its regime."""

    mu: float                # rad, positive inward
    regime: BankRegime

    @property
    def mu_deg(self) -> float:
        return math.degrees(self.mu)


@dataclass(frozen=True)
class SensitivityReport:
    """Partial derivatives of the bank angle on the zero-bank locus."""

    d_mu_d_eta: float        # rad
    d_mu_d_kappa: float      # rad
    d_mu_d_theta: float      # rad/rad
    d_mu_d_L: float          # rad/m, NaN when L is not given
    eta_star: float
    denominator: float       # 1 + eta* cos(theta)

    def signs(self) -> tuple:
        """Signs of the four partials (-1, 0, +1)."""
        values = (self.d_mu_d_eta, self.d_mu_d_kappa, self.d_mu_d_theta, self.d_mu_d_L)
        return tuple(int(math.copysign(1, v)) if v != 0 else 0 for v in values)


@dataclass(frozen=True, eq=False)
class TetherSolution:
    """Closed-form attitude and inputs at one instant on the parallel."""

    t: float
    R: Rot3
    omega_body: Vec3Body
    T: float                 # N
    alpha: float             # rad
    mu: float                # rad
    trim: TrimPair


@dataclass(frozen=True)
class TetherSweepRow:
    """One row of a tension sweep."""

    F_ext: float             # N
    mu_deg: float
    alpha_deg: float
    T: float                 # N
    omega_cir: float         # rad/s
    regime: BankRegime
    F_ext_zero_bank: float   # N
    feasible: bool
    reason: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "F_ext": self.F_ext,
            "mu_deg": self.mu_deg,
            "alpha_deg": self.alpha_deg,
            "T": self.T,
            "omega_cir": self.omega_cir,
            "regime": self.regime.value,
            "F_ext_zero_bank": self.F_ext_zero_bank,
            "feasible": self.feasible,
            "reason": self.reason or "",
        }
