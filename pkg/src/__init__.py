"""Inverse flight dynamics on SO(3).

Reconstructs the attitude, thrust, angle of attack, body rates and control
moments a fixed-wing aircraft needs to follow a prescribed flight path, with
closed forms for tethered flight on a spherical parallel and a forward
simulator to check the result.
"""

__version__ = "1.0.0"
__author__ = "Nayyer"

from .models import (
    AeroPolar,
    AircraftParams,
    TrajectoryPoint,
    InverseSolution,
    InversionOptions,
    ControlAllocation,
    TetherScenario,
    BankRegime,
    RigidBodyState,
    InputSchedule,
    ErrorReport,
)

from .parsers import (
    load_trajectory,
    load_scenario,
    write_solutions,
)

from .engine import (
    preset,
    invert_trajectory,
    solve_trim,
    bank_angle,
    cardano_trim,
    zero_bank_tension,
    analytic_solution,
    integrate,
    roundtrip_verify,
)

__all__ = [
    # Version
    "__version__",
    "__author__",
    # Models
    "AeroPolar",
    "AircraftParams",
    "TrajectoryPoint",
    "InverseSolution",
    "InversionOptions",
    "ControlAllocation",
    "TetherScenario",
    "BankRegime",
    "RigidBodyState",
    "InputSchedule",
    "ErrorReport",
    # Parsers
    "load_trajectory",
    "load_scenario",
    "write_solutions",
    # Engine
    "preset",
    "invert_trajectory",
    "solve_trim",
    "bank_angle",
    "cardano_trim",
    "zero_bank_tension",
    "analytic_solution",
    "integrate",
    "roundtrip_verify",
]
