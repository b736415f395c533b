"""Forward simulation state, inputs and error report."""

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, List

import numpy as np

from .frames import Rot3, Vec3Body, Vec3World


@dataclass(frozen=True, eq=False)
class RigidBodyState:
    """Position, velocity, attitude and body rate."""

    p: Vec3World             # m
    v: Vec3World             # m/s
    R: Rot3
    omega_body: Vec3Body     # rad/s

    def is_finite(self) -> bool:
        return bool(
            np.all(np.isfinite(self.p))
            and np.all(np.isfinite(self.v))
            and np.all(np.isfinite(self.R))
            and np.all(np.isfinite(self.omega_body))
        )


def _zero_scalar(t: float) -> float:
    return 0.0


def _zero_vector(t: float) -> np.ndarray:
    return np.zeros(3)


def _zero_field(t: float, p: np.ndarray) -> np.ndarray:
    return np.zeros(3)


@dataclass(frozen=True)
class InputSchedule:
    """Time-varying inputs of the forward model."""

    thrust: Callable[[float], float] = _zero_scalar                       # N
    moment_coefficients: Callable[[float], np.ndarray] = _zero_vector     # (C_l, C_m, C_n)
    f_ext: Callable[[float, np.ndarray], np.ndarray] = _zero_field        # (t, p) -> N world
    tau_ext: Callable[[float], np.ndarray] = _zero_vector                 # N*m body
    tau_prop: Callable[[float], np.ndarray] = _zero_vector                # N*m body
    wind: Callable[[float, np.ndarray], np.ndarray] = _zero_field         # (t, p) -> m/s world


@dataclass(frozen=True, eq=False)
class StateDerivative:
    """Right-hand side of the equations of motion."""

    p_dot: Vec3World
    v_dot: Vec3World
    R_dot: np.ndarray
    omega_dot: Vec3Body


@dataclass(eq=False)
class SimulationResult:
    """States emitted at every integration step."""

    times: np.ndarray
    states: List[RigidBodyState] = field(default_factory=list)

    @property
    def positions(self) -> np.ndarray:
        return np.array([s.p for s in self.states])

    @property
    def rotations(self) -> np.ndarray:
        return np.array([s.R for s in self.states])

    @property
    def final_state(self) -> RigidBodyState:
        return self.states[-1]


@dataclass(frozen=True)
class ErrorReport:
    """Worst-case deviation of a forward run from its reference."""

    max_pos_err: float       # m
    max_att_err: float       # rad, geodesic
    max_speed_err: float     # m/s
    dt: float = math.nan     # s
    t_end: float = math.nan  # s
    n_steps: int = 0

    def within(self, pos_tol: float, att_tol: float) -> bool:
        """True when both position and attitude errors are below tolerance."""
        return self.max_pos_err < pos_tol and self.max_att_err < att_tol

    def to_dict(self) -> dict:
        return asdict(self)
