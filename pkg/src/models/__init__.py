"""Data models for inverse flight dynamics."""

from .errors import (
    FlightDynamicsError,
    ModelValidationError,
)

from .frames import (
    Vec3World,
    Vec3Body,
    Matrix3,
    Rot3,
    AngularState,
    E1,
    E2,
    E3,
    world_vector,
    body_vector,
    as_vec3,
)

from .aircraft import (
    AeroPolar,
    AircraftParams,
    AeroAngles,
    AeroDirections,
    AirState,
    LiftingSurface,
    AircraftPreset,
    PresetId,
)

from .trajectory import (
    TrajectoryPoint,
    ForceDecomposition,
    TrimPair,
    SampleFlags,
    InfeasibleReason,
    ControlAllocation,
    AllocationResult,
    InverseSolution,
    InversionOptions,
)

from .tether import (
    TetherScenario,
    TetherScenarioError,
    DemandComponents,
    BankRegime,
    BankResult,
    SensitivityReport,
    TetherSolution,
    TetherSweepRow,
)

from .simulation import (
    RigidBodyState,
    InputSchedule,
    StateDerivative,
    SimulationResult,
    ErrorReport,
)

__all__ = [
    # Errors
    "FlightDynamicsError",
    "ModelValidationError",
    # Frames
    "Vec3World",
    "Vec3Body",
    "Matrix3",
    "Rot3",
    "AngularState",
    "E1",
    "E2",
    "E3",
    "world_vector",
    "body_vector",
    "as_vec3",
    # Aircraft
    "AeroPolar",
    "AircraftParams",
    "AeroAngles",
    "AeroDirections",
    "AirState",
    "LiftingSurface",
    "AircraftPreset",
    "PresetId",
    # Trajectory / inversion
    "TrajectoryPoint",
    "ForceDecomposition",
    "TrimPair",
    "SampleFlags",
    "InfeasibleReason",
    "ControlAllocation",
    "AllocationResult",
    "InverseSolution",
    "InversionOptions",
    # Tether
    "TetherScenario",
    "TetherScenarioError",
    "DemandComponents",
    "BankRegime",
    "BankResult",
    "SensitivityReport",
    "TetherSolution",
    "TetherSweepRow",
    # Simulation
    "RigidBodyState",
    "InputSchedule",
    "StateDerivative",
    "SimulationResult",
    "ErrorReport",
]
