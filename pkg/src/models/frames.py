"""Frame-tagged vectors, rotation matrices and angular state."""

from dataclasses import dataclass
from typing import NewType

import numpy as np

from .errors import ModelValidationError


# Frame tags live in the type: a Vec3World is never passed where a Vec3Body
# is expected. The tags are erased at runtime so the integrator stays lean.
Vec3World = NewType("Vec3World", np.ndarray)   # components in the world frame (z up)
Vec3Body = NewType("Vec3Body", np.ndarray)     # components in the FLU body frame
Matrix3 = NewType("Matrix3", np.ndarray)       # generic 3x3 matrix
Rot3 = NewType("Rot3", np.ndarray)             # body -> world, columns (c, s, n)


def _axis(index: int) -> np.ndarray:
    vec = np.zeros(3)
    vec[index] = 1.0
    vec.setflags(write=False)
    return vec


E1 = _axis(0)  # world east / body chord
E2 = _axis(1)  # world north / body span (left)
E3 = _axis(2)  # world up / body normal


def world_vector(x: float, y: float, z: float) -> Vec3World:
    """Build a world-frame vector."""
    return Vec3World(np.array([x, y, z], dtype=float))


def body_vector(x: float, y: float, z: float) -> Vec3Body:
    """Build a body-frame vector."""
    return Vec3Body(np.array([x, y, z], dtype=float))


def as_vec3(values, name: str = "vector") -> np.ndarray:
    """
    Coerce a sequence into a finite float 3-vector.

    Args:
        values: Any sequence of three numbers
        name: Label used in the error message

    Returns:
        New float array of shape (3,)

    Raises:
        ModelValidationError: If the shape is wrong or a component is not finite
    """
    vec = np.array(values, dtype=float).reshape(-1)
    if vec.shape != (3,):
        raise ModelValidationError(f"{name} must have 3 components, got {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise ModelValidationError(f"{name} has non-finite components: {vec}")
    return vec


@dataclass(frozen=True, eq=False)
class AngularState:
    """Body angular velocity and its time derivative."""

    omega_body: Vec3Body         # rad/s
    omega_dot_body: Vec3Body     # rad/s^2

    def __post_init__(self):
        object.__setattr__(self, "omega_body", Vec3Body(as_vec3(self.omega_body, "omega_body")))
        object.__setattr__(
            self, "omega_dot_body", Vec3Body(as_vec3(self.omega_dot_body, "omega_dot_body"))
        )

    @property
    def rate_magnitude(self) -> float:
        """Norm of the body rate in rad/s."""
        return float(np.linalg.norm(self.omega_body))
