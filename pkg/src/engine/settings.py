"""Solver settings loaded from YAML with hardcoded fallbacks."""

import logging
import math
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

import yaml

from ..models.errors import FlightDynamicsError


logger = logging.getLogger(__name__)

EPS_ENV_VAR = "IFD_EPS_AIRSPEED"


class SettingsError(FlightDynamicsError):
    """Exception raised for unusable solver settings."""
    pass


@dataclass(frozen=True)
class SolverSettings:
    """Numerical constants of the pipeline."""

    gravity: float = 9.81                   # m/s^2
    eps_airspeed: float = 0.5               # m/s
    alpha_max: float = math.radians(15.0)   # rad
    trim_tolerance: float = 1e-12           # rad
    trim_max_iterations: int = 60
    perp_degeneracy_rel: float = 1e-6
    q_min: float = 1e-6                     # Pa
    cond_max: float = 1e8
    tikhonov_scale: float = 1e-8
    fd_step: float = 1e-5                   # s
    rate_step_factor: float = 100.0
    coupling_max_passes: int = 5
    coupling_tolerance: float = 1e-8
    zero_bank_rel_tol: float = 1e-9
    reorthonormalize_above: float = 1e-9


# YAML section/key -> SolverSettings field
_YAML_KEYS = {
    ("airspeed", "eps"): "eps_airspeed",
    ("trim", "tolerance"): "trim_tolerance",
    ("trim", "max_iterations"): "trim_max_iterations",
    ("trim", "perp_degeneracy_rel"): "perp_degeneracy_rel",
    ("moments", "q_min"): "q_min",
    ("allocation", "cond_max"): "cond_max",
    ("allocation", "tikhonov_scale"): "tikhonov_scale",
    ("frame_rates", "fd_step"): "fd_step",
    ("frame_rates", "rate_step_factor"): "rate_step_factor",
    ("coupling", "max_passes"): "coupling_max_passes",
    ("coupling", "tolerance"): "coupling_tolerance",
    ("regimes", "zero_bank_rel_tol"): "zero_bank_rel_tol",
    ("integration", "reorthonormalize_above"): "reorthonormalize_above",
}


def default_config_path() -> Path:
    """Path of the bundled solver_config.yaml."""
    return Path(__file__).parent.parent.parent / "config" / "solver_config.yaml"


def load_settings(config_path: Optional[str] = None) -> SolverSettings:
    """
    Load solver settings.

    Args:
        config_path: YAML file to read. Defaults to config/solver_config.yaml

    Returns:
        SolverSettings with the IFD_EPS_AIRSPEED override applied

    Raises:
        SettingsError: If a value has the wrong type or the override is invalid
    """
    path = Path(config_path) if config_path else default_config_path()
    values = {}
    try:
        with open(path, "r") as f:
            raw = yaml.safe_load(f) or {}
    except FileNotFoundError:
        # Use hardcoded defaults if YAML not found
        logger.warning("solver config %s not found, using built-in defaults", path)
        raw = {}

    if "gravity" in raw:
        values["gravity"] = raw["gravity"]
    if "alpha_max_deg" in raw.get("trim", {}):
        values["alpha_max"] = math.radians(raw["trim"]["alpha_max_deg"])
    for (section, key), attr in _YAML_KEYS.items():
        if key in (raw.get(section) or {}):
            values[attr] = raw[section][key]

    types = {f.name: f.type for f in fields(SolverSettings)}
    try:
        coerced = {
            name: int(value) if types[name] in (int, "int") else float(value)
            for name, value in values.items()
        }
    except (TypeError, ValueError) as exc:
        raise SettingsError(f"invalid value in {path}: {exc}") from exc

    settings = SolverSettings(**coerced)
    return apply_environment(settings)


def apply_environment(settings: SolverSettings) -> SolverSettings:
    """Apply the airspeed-floor environment override."""
    override = os.environ.get(EPS_ENV_VAR)
    if override is None or override.strip() == "":
        return settings
    try:
        eps = float(override)
    except ValueError as exc:
        raise SettingsError(f"{EPS_ENV_VAR} must be a number, got '{override}'") from exc
    if not (math.isfinite(eps) and eps > 0):
        raise SettingsError(f"{EPS_ENV_VAR} must be positive, got {eps}")
    logger.debug("airspeed floor overridden from environment: %g m/s", eps)
    return replace(settings, eps_airspeed=eps)


# Global settings instance (singleton pattern)
_settings_instance: Optional[SolverSettings] = None


def get_settings() -> SolverSettings:
    """Get or create the global SolverSettings instance."""
    global _settings_instance
    if _settings_instance is None:
        _settings_instance = load_settings()
    return _settings_instance


def reset_settings() -> None:
    """Drop the cached settings so the next call reloads them."""
    global _settings_instance
    _settings_instance = None
