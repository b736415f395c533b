"""Trajectory samples and inverse-dynamics result models."""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from .errors import ModelValidationError
from .frames import AngularState, Rot3, Vec3Body, Vec3World, as_vec3


class InfeasibleReason(Enum):
    """Why a sample could not be inverted cleanly."""
    NO_TRIM = "no-trim"
    NEGATIVE_THRUST = "negative-thrust"
    STALL = "stall"
    THRUST_LIMIT = "thrust-limit"
    NO_DYNAMIC_PRESSURE = "no-dynamic-pressure"
    SATURATION = "saturation"
    UNALLOCATABLE = "unallocatable"
    VERTICAL_FLIGHT = "vertical-flight"
    RATES_UNDEFINED = "rates-undefined"


def _zeros3() -> np.ndarray:
    return np.zeros(3)


@dataclass(frozen=True, eq=False)
class TrajectoryPoint:
    """One time-stamped sample of the commanded centre-of-mass motion."""

    t: float                                       # s
    p: Vec3World                                   # m
    v: Vec3World                                   # m/s
    a: Vec3World                                   # m/s^2
    f_ext_world: Vec3World = field(default_factory=_zeros3)   # N
    tau_ext_body: Vec3Body = field(default_factory=_zeros3)   # N*m
    w_world: Vec3World = field(default_factory=_zeros3)       # m/s wind

    def __post_init__(self):
        if not math.isfinite(self.t):
            raise ModelValidationError(f"sample time must be finite, got {self.t}")
        for name in ("p", "v", "a", "f_ext_world", "tau_ext_body", "w_world"):
            object.__setattr__(self, name, as_vec3(getattr(self, name), name))


@dataclass(frozen=True, eq=False)
class ForceDecomposition:
    """Required force split along and across the flow."""

    F_req_world: Vec3World        # N
    f_par: float                  # N, along e_a
    F_perp_world: Vec3World       # N, orthogonal to e_a
    f_perp: float                 # N
    degenerate: bool = False      # f_perp below the scale-free threshold
    n_curve_world: Optional[Vec3World] = None
    s_traj_world: Optional[Vec3World] = None


@dataclass(frozen=True)
class TrimPair:
    """Thrust and angle of attack balancing the required force."""

    T: float                      # N
    alpha: float                  # rad
    iterations: int
    residual: float               # |alpha - atan2(T_perp, T_par)|
    infeasible: Optional[InfeasibleReason] = None

    @property
    def is_feasible(self) -> bool:
        return self.infeasible is None


@dataclass(frozen=True)
class SampleFlags:
    """Diagnostics attached to one inverted sample."""

    regularized_airspeed: bool = False
    degenerate_perp: bool = False
    infeasible: Tuple[InfeasibleReason, ...] = ()

    @property
    def is_feasible(self) -> bool:
        return not self.infeasible

    def with_reason(self, reason: InfeasibleReason) -> "SampleFlags":
        """Return a copy with one more infeasibility reason."""
        if reason in self.infeasible:
            return self
        return SampleFlags(
            regularized_airspeed=self.regularized_airspeed,
            degenerate_perp=self.degenerate_perp,
            infeasible=self.infeasible + (reason,),
        )

    def labels(self) -> List[str]:
        """Flag names as written to files."""
        names = []
        if self.regularized_airspeed:
            names.append("regularized_airspeed")
        if self.degenerate_perp:
            names.append("degenerate_perp")
        names.extend(f"infeasible:{reason.value}" for reason in self.infeasible)
        return names

    def to_text(self) -> str:
        """Single-cell representation ("ok" when clean)."""
        return "|".join(self.labels()) or "ok"

    @classmethod
    def from_text(cls, text: str) -> "SampleFlags":
        """Parse the representation written by to_text."""
        if not text or text == "ok":
            return cls()
        regularized = degenerate = False
        reasons = []
        for label in text.split("|"):
            if label == "regularized_airspeed":
                regularized = True
            elif label == "degenerate_perp":
                degenerate = True
            elif label.startswith("infeasible:"):
                reasons.append(InfeasibleReason(label.split(":", 1)[1]))
            else:
                raise ModelValidationError(f"unknown flag label '{label}'")
        return cls(regularized, degenerate, tuple(reasons))


# B_eff may be a fixed matrix or a function of alpha
EffectivenessMap = Union[np.ndarray, Callable[[float], np.ndarray]]


@dataclass(frozen=True, eq=False)
class ControlAllocation:
    """Linear map from surface deflections to moment coefficients."""

    B_eff: EffectivenessMap                     # 3 x n_u, per rad
    u_min: np.ndarray                           # rad
    u_max: np.ndarray                           # rad
    C_passive: Optional[Callable[[float, float, np.ndarray], np.ndarray]] = None
    # (alpha, u) -> (dC_L, dC_D) used only by the coupling iteration
    force_coupling: Optional[Callable[[float, np.ndarray], Tuple[float, float]]] = None

    def __post_init__(self):
        u_min = np.atleast_1d(np.array(self.u_min, dtype=float))
        u_max = np.atleast_1d(np.array(self.u_max, dtype=float))
        if u_min.shape != u_max.shape or np.any(u_min > u_max):
            raise ModelValidationError("u_min/u_max must have equal shape with u_min <= u_max")
        object.__setattr__(self, "u_min", u_min)
        object.__setattr__(self, "u_max", u_max)

    @property
    def n_u(self) -> int:
        return int(self.u_min.shape[0])

    def matrix(self, alpha: float) -> np.ndarray:
        """Evaluate B_eff at alpha."""
        B = self.B_eff(alpha) if callable(self.B_eff) else self.B_eff
        B = np.array(B, dtype=float)
        if B.ndim != 2 or B.shape[0] != 3 or B.shape[1] != self.n_u:
            raise ModelValidationError(f"B_eff must be 3x{self.n_u}, got {B.shape}")
        if not np.all(np.isfinite(B)):
            raise ModelValidationError("B_eff has non-finite entries")
        return B

    def passive(self, alpha: float, beta: float, omega_body: np.ndarray) -> np.ndarray:
        """Passive moment coefficients (zero when no model is attached)."""
        if self.C_passive is None:
            return np.zeros(3)
        return as_vec3(self.C_passive(alpha, beta, omega_body), "C_passive")


@dataclass(frozen=True, eq=False)
class AllocationResult:
    """Surface deflections and the axes that hit a limit."""

    u: np.ndarray                               # rad
    saturated_axes: Tuple[int, ...] = ()

    @property
    def saturated(self) -> bool:
        return bool(self.saturated_axes)


@dataclass(frozen=True, eq=False)
class InverseSolution:
    """Attitude, rates and inputs reconstructed at one sample."""

    t: float
    R: Rot3
    omega_body: Vec3Body          # rad/s
    omega_dot_body: Vec3Body      # rad/s^2
    T: float                      # N
    alpha: float                  # rad
    beta: float                   # rad
    bank: float                   # rad, positive toward the left wing
    C_l: float
    C_m: float
    C_n: float
    u: np.ndarray                 # rad, empty without allocation
    flags: SampleFlags
    F_req_world: Vec3World
    e_a_world: Vec3World
    q: float                      # Pa

    @property
    def moment_coefficients(self) -> np.ndarray:
        return np.array([self.C_l, self.C_m, self.C_n])

    @property
    def angular_state(self) -> AngularState:
        return AngularState(self.omega_body, self.omega_dot_body)


@dataclass(frozen=True)
class InversionOptions:
    """Switches of the inversion pipeline."""

    g: Optional[float] = None                                # m/s^2, None -> settings
    eps: Optional[float] = None                              # m/s, None -> settings
    tau_prop: Optional[Callable[[float], np.ndarray]] = None     # t -> N*m body
    attitude_sampler: Optional[Callable[[float], np.ndarray]] = None  # t -> Rot3
    couple_controls: bool = False
    max_coupling_passes: Optional[int] = None                # None -> settings
    coupling_tol: Optional[float] = None
    skew_tolerance: float = 1e-3
