"""Input validation utilities for trajectory and solution files."""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence


@dataclass
class ValidationError:
    """Represents a validation error."""
    field: str
    message: str
    row: Optional[int] = None      # 1-based line number in the file
    value: Optional[str] = None


@dataclass
class ValidationResult:
    """Result of a validation operation."""
    is_valid: bool
    errors: List[ValidationError]
    warnings: List[ValidationError]

    @classmethod
    def success(cls) -> "ValidationResult":
        return cls(is_valid=True, errors=[], warnings=[])

    def add_error(self, error: ValidationError):
        self.errors.append(error)
        self.is_valid = False

    def add_warning(self, warning: ValidationError):
        self.warnings.append(warning)

    def merge(self, other: "ValidationResult"):
        """Append the errors and warnings of another result."""
        for error in other.errors:
            self.add_error(error)
        self.warnings.extend(other.warnings)

    def first_error(self) -> Optional[ValidationError]:
        """Error with the smallest line number (column errors first)."""
        if not self.errors:
            return None
        return min(self.errors, key=lambda e: -1 if e.row is None else e.row)


# Column groups of a trajectory file, in file order
COLUMN_GROUPS: Dict[str, List[str]] = {
    "time": ["t"],
    "position": ["px", "py", "pz"],
    "velocity": ["vx", "vy", "vz"],
    "acceleration": ["ax", "ay", "az"],
    "external_force": ["fx", "fy", "fz"],
    "external_torque": ["taux", "tauy", "tauz"],
    "wind": ["wx", "wy", "wz"],
}

REQUIRED_GROUPS = ["time", "position", "velocity", "acceleration"]

OPTIONAL_GROUPS = ["external_force", "external_torque", "wind"]

REQUIRED_COLUMNS = [c for g in REQUIRED_GROUPS for c in COLUMN_GROUPS[g]]

OPTIONAL_COLUMNS = [c for g in OPTIONAL_GROUPS for c in COLUMN_GROUPS[g]]

TRAJECTORY_COLUMNS = REQUIRED_COLUMNS + OPTIONAL_COLUMNS


def validate_trajectory_columns(columns: Sequence[str]) -> ValidationResult:
    """
    Validate the header of a trajectory file.

    Required groups must be present. Optional groups may be left out as a
    whole (they default to zero) but not partially.

    Args:
        columns: Column names from the CSV header

    Returns:
        ValidationResult with errors for missing columns
    """
    result = ValidationResult.success()
    present = {str(c).strip() for c in columns}

    for required in REQUIRED_COLUMNS:
        if required not in present:
            result.add_error(ValidationError(
                field=required,
                message=f"Required column missing: {required}",
                row=1,
            ))

    for group in OPTIONAL_GROUPS:
        names = COLUMN_GROUPS[group]
        found = [name for name in names if name in present]
        if found and len(found) != len(names):
            missing = [name for name in names if name not in present]
            result.add_error(ValidationError(
                field=group,
                message=f"Incomplete {group} columns, missing {', '.join(missing)}",
                row=1,
            ))

    for column in sorted(present - set(TRAJECTORY_COLUMNS)):
        result.add_warning(ValidationError(
            field=column,
            message=f"Unknown column ignored: {column}",
            row=1,
        ))

    return result


def validate_numeric_cell(value, column: str, line_number: int) -> Optional[ValidationError]:
    """Return an error unless value is a finite number."""
    try:
        number = float(value)
    except (TypeError, ValueError):
        return ValidationError(
            field=column,
            message=f"Line {line_number}: '{column}' is not a number",
            row=line_number,
            value=str(value),
        )
    if not math.isfinite(number):
        return ValidationError(
            field=column,
            message=f"Line {line_number}: '{column}' is missing or not finite",
            row=line_number,
            value=str(value),
        )
    return None


def validate_trajectory_row(row: dict, line_number: int, columns: Sequence[str]) -> ValidationResult:
    """
    Validate a single row of a trajectory file.

    Args:
        row: Dictionary of row data
        line_number: 1-based line number for error reporting
        columns: Columns to check

    Returns:
        ValidationResult with any errors found
    """
    result = ValidationResult.success()
    for column in columns:
        error = validate_numeric_cell(row.get(column), column, line_number)
        if error is not None:
            result.add_error(error)
    return result


def validate_sample_times(times: Sequence[float], first_line: int = 2) -> ValidationResult:
    """Check that sample times increase strictly."""
    result = ValidationResult.success()
    for index in range(1, len(times)):
        if not times[index] > times[index - 1]:
            line_number = first_line + index
            result.add_error(ValidationError(
                field="t",
                message=(
                    f"Line {line_number}: time {times[index]!r} does not increase "
                    f"(previous {times[index - 1]!r})"
                ),
                row=line_number,
                value=repr(times[index]),
            ))
    return result
