"""Scenario JSON, preset JSON and run-configuration models."""

import json
import logging
import math
from dataclasses import replace
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..engine.presets import PresetError, preset, preset_from_dict
from ..models import AeroPolar, AircraftParams, AircraftPreset, FlightDynamicsError, TetherScenario


logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

DEFAULT_PRESET = "Paper5"


class ScenarioError(FlightDynamicsError):
    """Exception raised for invalid scenario or configuration input."""
    pass


class PolarSpec(BaseModel):
    """Small-angle polar given inline in a scenario."""

    model_config = ConfigDict(extra="forbid")

    a: float = Field(gt=0)              # 1/rad
    C_D0: float = Field(gt=0)
    k_alpha: float = Field(gt=0)        # 1/rad^2
    k: Optional[float] = Field(default=None, gt=0)

    def to_polar(self) -> AeroPolar:
        k = self.k if self.k is not None else self.k_alpha / self.a ** 2
        return AeroPolar(a=self.a, C_D0=self.C_D0, k=k, k_alpha=self.k_alpha)


class ScenarioFile(BaseModel):
    """
    Tethered-flight scenario.

    The circle is given by theta_deg or by its radius r. The aircraft comes
    from a preset (Paper5 when absent); an inline polar replaces the preset
    polar, and m, rho, S and alpha_max_deg override the preset values.
    """

    model_config = ConfigDict(extra="forbid")

    L: float = Field(gt=0)                          # m
    theta_deg: Optional[float] = Field(default=None, gt=0, le=90)
    r: Optional[float] = Field(default=None, gt=0)  # m
    v0: float = Field(gt=0)                         # m/s
    F_ext: float = 0.0                              # N
    m: Optional[float] = Field(default=None, gt=0)  # kg
    g: float = Field(default=9.81, gt=0)            # m/s^2
    rho: Optional[float] = Field(default=None, gt=0)  # kg/m^3
    psi0_deg: float = 0.0
    polar: Optional[PolarSpec] = None
    preset: Optional[str] = None
    S: Optional[float] = Field(default=None, gt=0)  # m^2
    alpha_max_deg: Optional[float] = Field(default=None, gt=0, lt=90)

    @model_validator(mode="after")
    def _one_geometry(self) -> "ScenarioFile":
        if (self.theta_deg is None) == (self.r is None):
            raise ValueError("give exactly one of theta_deg and r")
        if self.r is not None and self.r > self.L:
            raise ValueError(f"r={self.r} exceeds the tether length L={self.L}")
        return self

    def to_scenario(self, F_ext: Optional[float] = None) -> TetherScenario:
        """
        Build the TetherScenario (optionally with another tension).

        Mass and density come from the aircraft when the file leaves them out.

        Raises:
            ScenarioError: If the preset id is unknown
        """
        params, _ = self.aircraft()
        kwargs = dict(
            v0=self.v0,
            F_ext=self.F_ext if F_ext is None else F_ext,
            m=params.m,
            g=self.g,
            rho=params.rho,
            psi0=math.radians(self.psi0_deg),
        )
        if self.r is not None:
            return TetherScenario.from_radius(self.L, self.r, **kwargs)
        return TetherScenario(L=self.L, theta=math.radians(self.theta_deg), **kwargs)

    def aircraft(self) -> Tuple[AircraftParams, AeroPolar]:
        """Aircraft parameters and polar of the scenario."""
        try:
            base = preset(self.preset or DEFAULT_PRESET)
        except PresetError as exc:
            raise ScenarioError(str(exc)) from exc

        overrides = {}
        if self.m is not None:
            overrides["m"] = self.m
        if self.rho is not None:
            overrides["rho"] = self.rho
        if self.S is not None:
            overrides["S"] = self.S
        if self.alpha_max_deg is not None:
            overrides["alpha_max"] = math.radians(self.alpha_max_deg)
        params = replace(base.params, **overrides)
        polar = self.polar.to_polar() if self.polar is not None else base.polar
        return params, polar


def _read_json(file_path: PathLike) -> dict:
    path = Path(file_path)
    try:
        return json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ScenarioError(f"File not found: {file_path}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{file_path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc


def load_scenario(file_path: PathLike) -> ScenarioFile:
    """
    Read and validate a scenario JSON file.

    Raises:
        ScenarioError: If the file is missing, not JSON or fails validation
    """
    data = _read_json(file_path)
    try:
        scenario = ScenarioFile.model_validate(data)
    except ValidationError as exc:
        raise ScenarioError(f"{file_path}: {_summarize(exc)}") from exc
    logger.debug("loaded scenario %s", file_path)
    return scenario


def load_preset_json(file_path: PathLike) -> AircraftPreset:
    """Load a preset previously exported with `presets`."""
    data = _read_json(file_path)
    try:
        return preset_from_dict(data)
    except PresetError as exc:
        raise ScenarioError(f"{file_path}: {exc}") from exc


def _summarize(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        location = ".".join(str(item) for item in error["loc"]) or "scenario"
        parts.append(f"{location}: {error['msg']}")
    return "; ".join(parts)


# =============================================================================
# Run configuration
# =============================================================================

class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class RunConfig(BaseModel):
    """Options of one command-line run."""

    model_config = ConfigDict(extra="forbid")

    subcommand: str
    scenario: Optional[Path] = None
    trajectory: Optional[Path] = None
    out: Optional[Path] = None
    grid_F_ext: List[float] = Field(default_factory=list)
    grid_eta: List[float] = Field(default_factory=list)
    grid_theta_deg: List[float] = Field(default_factory=list)
    grid_kappa: List[float] = Field(default_factory=list)
    dt: float = Field(default=1e-3, gt=0)           # s
    n_orbits: float = Field(default=1.0, gt=0)
    format: OutputFormat = OutputFormat.CSV
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _grids_nonempty(self) -> "RunConfig":
        if self.subcommand == "tether" and not self.grid_F_ext:
            raise ValueError("the tension grid is empty")
        if self.subcommand == "sweep":
            for name in ("grid_eta", "grid_theta_deg", "grid_kappa"):
                if not getattr(self, name):
                    raise ValueError(f"{name} is empty")
        return self


def parse_grid(text: str) -> List[float]:
    """
    Parse "a:b:step" (end included within 1e-9 step) or "x1,x2,...".

    Raises:
        ScenarioError: On malformed text, a non-positive step or an empty grid
    """
    text = str(text).strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3:
                raise ScenarioError(f"range '{text}' must be start:stop:step")
            start, stop, step = parts
            if not step > 0:
                raise ScenarioError(f"range '{text}' needs a positive step")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [start + i * step for i in range(max(count, 0))]
        else:
            values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ScenarioError(f"grid '{text}' is not numeric") from exc
    if not values:
        raise ScenarioError(f"grid '{text}' is empty")
    return values
