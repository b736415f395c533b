"""Parsers for trajectory, scenario and result files."""

from .trajectory_parser import (
    ParseError,
    TrajectoryParser,
    TrajectoryParseResult,
    load_trajectory,
    trajectory_frame,
    write_trajectory,
    solution_columns,
    solution_frame,
    write_solutions,
    read_table,
    write_frame,
    write_json,
    records,
)

from .scenario_parser import (
    ScenarioError,
    PolarSpec,
    ScenarioFile,
    OutputFormat,
    RunConfig,
    load_scenario,
    load_preset_json,
    parse_grid,
)

from .validators import (
    ValidationError,
    ValidationResult,
    validate_trajectory_columns,
    validate_trajectory_row,
    validate_sample_times,
    COLUMN_GROUPS,
    REQUIRED_COLUMNS,
    OPTIONAL_COLUMNS,
    TRAJECTORY_COLUMNS,
)

__all__ = [
    # Trajectory and result files
    "ParseError",
    "TrajectoryParser",
    "TrajectoryParseResult",
    "load_trajectory",
    "trajectory_frame",
    "write_trajectory",
    "solution_columns",
    "solution_frame",
    "write_solutions",
    "read_table",
    "write_frame",
    "write_json",
    "records",
    # Scenarios
    "ScenarioError",
    "PolarSpec",
    "ScenarioFile",
    "OutputFormat",
    "RunConfig",
    "load_scenario",
    "load_preset_json",
    "parse_grid",
    # Validators
    "ValidationError",
    "ValidationResult",
    "validate_trajectory_columns",
    "validate_trajectory_row",
    "validate_sample_times",
    "COLUMN_GROUPS",
    "REQUIRED_COLUMNS",
    "OPTIONAL_COLUMNS",
    "TRAJECTORY_COLUMNS",
]
