"""Aircraft parameter and aerodynamic data models."""

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Optional

import numpy as np
from scipy import linalg

from .errors import ModelValidationError
from .frames import E1, Matrix3, Vec3Body, Vec3World, as_vec3


# Slopes of user-supplied coefficient maps are taken numerically
COEFFICIENT_SLOPE_STEP = 1e-7  # rad


class PresetId(Enum):
    """Built-in aircraft presets."""
    CLASS_A = "ClassA"     # small UAV column of the parameter study
    CLASS_B = "ClassB"     # medium UAV column of the parameter study
    PAPER5 = "Paper5"      # 2 kg tethered demonstrator


@dataclass(frozen=True)
class AeroPolar:
    """
    Lift and drag coefficient model.

    The default maps are the small-angle forms C_L = a*alpha and
    C_D = C_D0 + k_alpha*alpha^2. Optional cl_fn / cd_fn replace them.
    """

    a: float                      # lift-curve slope C_L_alpha, 1/rad
    C_D0: float                   # zero-lift drag coefficient
    k: float                      # induced-drag factor on C_L^2
    k_alpha: Optional[float] = None   # induced-drag factor on alpha^2, 1/rad^2
    cl_fn: Optional[Callable[[float], float]] = field(default=None, compare=False)
    cd_fn: Optional[Callable[[float], float]] = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("a", "C_D0", "k"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ModelValidationError(f"AeroPolar.{name} must be positive, got {value}")
        if self.k_alpha is None:
            object.__setattr__(self, "k_alpha", self.k * self.a ** 2)
        elif not (math.isfinite(self.k_alpha) and self.k_alpha > 0):
            raise ModelValidationError(f"AeroPolar.k_alpha must be positive, got {self.k_alpha}")

    @property
    def is_small_angle(self) -> bool:
        """True when neither coefficient map is overridden."""
        return self.cl_fn is None and self.cd_fn is None

    @property
    def k_alpha_consistent(self) -> bool:
        """Check k_alpha = k*a^2 to 1e-12."""
        return abs(self.k_alpha - self.k * self.a ** 2) <= 1e-12

    def lift(self, alpha: float) -> float:
        """Lift coefficient at alpha."""
        if self.cl_fn is not None:
            return float(self.cl_fn(alpha))
        return self.a * alpha

    def drag(self, alpha: float) -> float:
        """Drag coefficient at alpha."""
        if self.cd_fn is not None:
            return float(self.cd_fn(alpha))
        return self.C_D0 + self.k_alpha * alpha * alpha

    def lift_slope(self, alpha: float) -> float:
        """dC_L/dalpha."""
        if self.cl_fn is not None:
            h = COEFFICIENT_SLOPE_STEP
            return (self.lift(alpha + h) - self.lift(alpha - h)) / (2 * h)
        return self.a

    def drag_slope(self, alpha: float) -> float:
        """dC_D/dalpha."""
        if self.cd_fn is not None:
            h = COEFFICIENT_SLOPE_STEP
            return (self.drag(alpha + h) - self.drag(alpha - h)) / (2 * h)
        return 2.0 * self.k_alpha * alpha


def _default_surface_limit() -> np.ndarray:
    return np.full(3, math.radians(25.0))


@dataclass(frozen=True, eq=False)
class AircraftParams:
    """Mass, inertia and aerodynamic reference data of one aircraft."""

    m: float                     # kg
    I_B: Matrix3                 # kg*m^2, body frame, SPD
    rho: float                   # kg/m^3
    S: float                     # m^2 wing reference area
    b: float                     # m span
    c_bar: float                 # m mean aerodynamic chord
    D_omega: Matrix3 = field(default_factory=lambda: np.zeros((3, 3)))  # N*m*s, NSD
    u_t_body: Vec3Body = field(default_factory=lambda: E1.copy())       # thrust axis
    alpha_max: float = math.radians(15.0)    # rad stall bound
    T_max: float = math.inf                  # N
    u_min: np.ndarray = field(default_factory=lambda: -_default_surface_limit())  # rad
    u_max: np.ndarray = field(default_factory=_default_surface_limit)             # rad
    name: str = "custom"

    def __post_init__(self):
        for attr in ("m", "rho", "S", "b", "c_bar", "alpha_max"):
            value = getattr(self, attr)
            if not (math.isfinite(value) and value > 0):
                raise ModelValidationError(f"AircraftParams.{attr} must be positive, got {value}")
        if not self.T_max > 0:
            raise ModelValidationError(f"AircraftParams.T_max must be positive, got {self.T_max}")

        inertia = np.array(self.I_B, dtype=float).reshape(3, 3)
        if not np.allclose(inertia, inertia.T, atol=1e-12):
            raise ModelValidationError("I_B must be symmetric")
        try:
            linalg.cholesky(inertia)
        except linalg.LinAlgError as exc:
            raise ModelValidationError("I_B must be positive definite") from exc

        damping = np.array(self.D_omega, dtype=float).reshape(3, 3)
        top_eig = float(np.max(np.linalg.eigvalsh(0.5 * (damping + damping.T))))
        if top_eig > 1e-12:
            raise ModelValidationError(
                f"D_omega must be negative semidefinite, largest eigenvalue {top_eig:g}"
            )

        thrust_axis = as_vec3(self.u_t_body, "u_t_body")
        if abs(np.linalg.norm(thrust_axis) - 1.0) > 1e-12:
            raise ModelValidationError("u_t_body must be a unit vector")

        u_min = np.atleast_1d(np.array(self.u_min, dtype=float))
        u_max = np.atleast_1d(np.array(self.u_max, dtype=float))
        if u_min.shape != u_max.shape or np.any(u_min > u_max):
            raise ModelValidationError("surface limits must satisfy u_min <= u_max elementwise")

        object.__setattr__(self, "I_B", Matrix3(inertia))
        object.__setattr__(self, "D_omega", Matrix3(damping))
        object.__setattr__(self, "u_t_body", Vec3Body(thrust_axis))
        object.__setattr__(self, "u_min", u_min)
        object.__setattr__(self, "u_max", u_max)

    @cached_property
    def I_inv(self) -> Matrix3:
        """Inverse inertia."""
        return Matrix3(np.linalg.inv(self.I_B))

    @property
    def aspect_ratio(self) -> float:
        """AR = b^2 / S."""
        return self.b ** 2 / self.S


@dataclass(frozen=True)
class AeroAngles:
    """Angle of attack and sideslip."""

    alpha: float   # rad, (-pi, pi]
    beta: float    # rad, [-pi/2, pi/2]

    @property
    def alpha_deg(self) -> float:
        return math.degrees(self.alpha)

    @property
    def beta_deg(self) -> float:
        return math.degrees(self.beta)


@dataclass(frozen=True, eq=False)
class AeroDirections:
    """Drag, side-force and lift unit directions in the body frame."""

    e_D: Vec3Body
    e_Y: Vec3Body
    e_L: Vec3Body

    def as_matrix(self) -> np.ndarray:
        """Columns (e_D, e_Y, e_L)."""
        return np.column_stack((self.e_D, self.e_Y, self.e_L))


@dataclass(frozen=True, eq=False)
class AirState:
    """Air-relative velocity, flow direction and dynamic pressure."""

    v_a_world: Vec3World     # m/s
    v_a_body: Vec3Body       # m/s
    e_a_world: Vec3World     # flow direction (scaled by |v_a|/eps when regularized)
    e_a_body: Vec3Body
    speed: float             # m/s, unregularized |v_a|
    q: float                 # Pa, uses the regularized speed
    regularized: bool = False


@dataclass(frozen=True, eq=False)
class LiftingSurface:
    """One lifting surface of a distributed aerodynamic model."""

    r_body: Vec3Body         # m, offset from the centre of mass
    S: float                 # m^2
    polar: AeroPolar
    normal_body: Vec3Body = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        object.__setattr__(self, "r_body", Vec3Body(as_vec3(self.r_body, "r_body")))
        object.__setattr__(self, "normal_body", Vec3Body(as_vec3(self.normal_body, "normal_body")))
        if not (math.isfinite(self.S) and self.S > 0):
            raise ModelValidationError(f"LiftingSurface.S must be positive, got {self.S}")


@dataclass(frozen=True)
class AircraftPreset:
    """Nominal aircraft from the built-in tables."""

    preset_id: PresetId
    params: AircraftParams
    polar: AeroPolar
    q: float                 # Pa, cruise dynamic pressure as tabulated
    V_cruise: float          # m/s
    aspect_ratio: float      # tabulated AR
    oswald: float            # Oswald efficiency e
