"""CSV reader and writers for trajectories, solutions and sweep tables."""

import json
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..models import FlightDynamicsError, InverseSolution, TrajectoryPoint
from .validators import (
    COLUMN_GROUPS,
    OPTIONAL_GROUPS,
    REQUIRED_COLUMNS,
    TRAJECTORY_COLUMNS,
    ValidationError,
    ValidationResult,
    validate_sample_times,
    validate_trajectory_columns,
    validate_trajectory_row,
)


logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# pandas reports ragged rows as "Expected N fields in line L, saw M"
_PANDAS_LINE = re.compile(r"line (\d+)")


class ParseError(FlightDynamicsError):
    """Exception raised for unreadable or malformed input files."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        super().__init__(message)
        self.line_number = line_number


@dataclass
class TrajectoryParseResult:
    """Result of parsing a trajectory file."""
    samples: List[TrajectoryPoint]
    validation_result: ValidationResult
    raw_data: pd.DataFrame

    @property
    def is_valid(self) -> bool:
        return self.validation_result.is_valid

    @property
    def sample_count(self) -> int:
        return len(self.samples)


class TrajectoryParser:
    """Parser for trajectory CSV files."""

    def __init__(self, file_path: PathLike):
        """
        Initialize the parser with a file path.

        Args:
            file_path: Path to the trajectory CSV file
        """
        self.file_path = Path(file_path)
        if not self.file_path.exists():
            raise ParseError(f"File not found: {file_path}")
        if self.file_path.suffix.lower() != ".csv":
            raise ParseError(f"Invalid file type: {self.file_path.suffix}. Expected .csv")

    def _read(self) -> pd.DataFrame:
        try:
            df = pd.read_csv(self.file_path, float_precision="round_trip", skipinitialspace=True)
        except pd.errors.EmptyDataError as exc:
            raise ParseError(f"{self.file_path} is empty", line_number=1) from exc
        except pd.errors.ParserError as exc:
            match = _PANDAS_LINE.search(str(exc))
            line_number = int(match.group(1)) if match else None
            raise ParseError(
                f"Malformed row in {self.file_path}: {exc}", line_number=line_number
            ) from exc
        df.columns = [str(c).strip() for c in df.columns]
        return df

    def parse(self) -> TrajectoryParseResult:
        """
        Parse the trajectory file.

        Missing optional groups (external force, external torque, wind) are
        filled with zeros.

        Returns:
            TrajectoryParseResult with samples and validation results
        """
        df = self._read()
        validation_result = validate_trajectory_columns(df.columns.tolist())
        if not validation_result.is_valid:
            return TrajectoryParseResult([], validation_result, df)

        for group in OPTIONAL_GROUPS:
            for column in COLUMN_GROUPS[group]:
                if column not in df.columns:
                    df[column] = 0.0

        for idx, row in enumerate(df[TRAJECTORY_COLUMNS].to_dict("records")):
            row_validation = validate_trajectory_row(row, idx + 2, TRAJECTORY_COLUMNS)  # +2 for header and 0-index
            validation_result.merge(row_validation)

        if validation_result.is_valid:
            validation_result.merge(validate_sample_times(df["t"].astype(float).tolist()))

        samples: List[TrajectoryPoint] = []
        if validation_result.is_valid:
            values = df[TRAJECTORY_COLUMNS].astype(float).to_numpy()
            samples = [_point_from_row(row) for row in values]
            logger.debug("read %d samples from %s", len(samples), self.file_path)

        return TrajectoryParseResult(samples, validation_result, df)


def _point_from_row(row: np.ndarray) -> TrajectoryPoint:
    return TrajectoryPoint(
        t=float(row[0]),
        p=row[1:4],
        v=row[4:7],
        a=row[7:10],
        f_ext_world=row[10:13],
        tau_ext_body=row[13:16],
        w_world=row[16:19],
    )


def load_trajectory(file_path: PathLike) -> List[TrajectoryPoint]:
    """
    Read a trajectory file.

    Raises:
        ParseError: With the line number of the first offending row
    """
    result = TrajectoryParser(file_path).parse()
    for warning in result.validation_result.warnings:
        logger.warning("%s: %s", file_path, warning.message)
    error = result.validation_result.first_error()
    if error is not None:
        raise ParseError(error.message, line_number=error.row)
    return result.samples


def trajectory_frame(samples: Sequence[TrajectoryPoint]) -> pd.DataFrame:
    """Trajectory samples in file layout."""
    rows = [
        [pt.t, *pt.p, *pt.v, *pt.a, *pt.f_ext_world, *pt.tau_ext_body, *pt.w_world]
        for pt in samples
    ]
    return pd.DataFrame(rows, columns=TRAJECTORY_COLUMNS)


def write_trajectory(samples: Sequence[TrajectoryPoint], file_path: PathLike) -> Path:
    """Write samples as a trajectory CSV."""
    return write_frame(trajectory_frame(samples), file_path)


# =============================================================================
# Solutions and tables
# =============================================================================

def solution_columns(n_u: int) -> List[str]:
    """Header of a solution file with n_u surfaces."""
    return (
        ["t"]
        + [f"R{i}{j}" for i in range(1, 4) for j in range(1, 4)]
        + ["wx_b", "wy_b", "wz_b", "T", "alpha_deg", "beta_deg", "Cl", "Cm", "Cn"]
        + [f"u{k}_deg" for k in range(1, n_u + 1)]
        + ["flags"]
    )


def solution_frame(solutions: Sequence[InverseSolution]) -> pd.DataFrame:
    """One row per inverted sample."""
    n_u = max((s.u.shape[0] for s in solutions), default=0)
    rows = []
    for s in solutions:
        rows.append(
            [s.t, *np.asarray(s.R).reshape(-1), *s.omega_body, s.T,
             math.degrees(s.alpha), math.degrees(s.beta), s.C_l, s.C_m, s.C_n,
             *np.degrees(s.u), s.flags.to_text()]
        )
    return pd.DataFrame(rows, columns=solution_columns(n_u))


def write_solutions(solutions: Sequence[InverseSolution], file_path: PathLike) -> Path:
    """Write a solution CSV."""
    return write_frame(solution_frame(solutions), file_path)


def read_table(file_path: PathLike) -> pd.DataFrame:
    """Read any CSV this package writes."""
    try:
        return pd.read_csv(
            file_path, float_precision="round_trip", keep_default_na=False, na_values=["nan", "NaN"]
        )
    except FileNotFoundError as exc:
        raise ParseError(f"File not found: {file_path}") from exc
    except pd.errors.ParserError as exc:
        match = _PANDAS_LINE.search(str(exc))
        raise ParseError(
            f"Malformed row in {file_path}: {exc}",
            line_number=int(match.group(1)) if match else None,
        ) from exc


def write_frame(df: pd.DataFrame, file_path: PathLike) -> Path:
    """Write a table with shortest round-trip float text."""
    path = Path(file_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False)
    return path


def write_json(payload: Any, file_path: PathLike) -> Path:
    """Write a JSON document."""
    path = Path(file_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, allow_nan=True) + "\n")
    return path


def records(df: pd.DataFrame) -> List[Dict[str, Any]]:
    """Rows of a table as plain dicts."""
    return df.to_dict("records")
