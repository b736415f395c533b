"""Aircraft preset database loaded from YAML."""

import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import yaml

from ..models.aircraft import AeroPolar, AircraftParams, AircraftPreset, PresetId
from ..models.errors import FlightDynamicsError
from .aero_model import induced_factor, k_alpha_of


logger = logging.getLogger(__name__)


class PresetError(FlightDynamicsError):
    """Exception raised for unknown or malformed presets."""
    pass


# Keys of the exported preset JSON, in output order
PRESET_JSON_KEYS = [
    "m", "S", "b", "AR", "e", "C_L_alpha", "C_D0", "k", "k_alpha", "rho", "V_cruise", "q",
]

# =============================================================================
# BUILT-IN NOMINAL VALUES (used when config/aero_presets.yaml is missing)
# =============================================================================

DEFAULT_PRESETS: Dict[str, Dict] = {
    "ClassA": {
        "m": 3.0, "S": 0.80, "b": 2.12, "AR": 5.62, "e": 0.80,
        "C_L_alpha": 4.35, "C_D0": 0.035, "k": 0.0708, "k_alpha": 1.34,
        "rho": 1.225, "V_cruise": 18.0, "q": 198.0,
        "alpha_max_deg": 15.0, "inertia_diag": [0.21, 0.15, 0.35],
    },
    "ClassB": {
        "m": 40.0, "S": 2.615, "b": 5.00, "AR": 9.56, "e": 0.90,
        "C_L_alpha": 5.10, "C_D0": 0.030, "k": 0.0370, "k_alpha": 0.962,
        "rho": 1.225, "V_cruise": 27.0, "q": 447.0,
        "alpha_max_deg": 15.0, "inertia_diag": [15.6, 10.0, 25.0],
    },
    "Paper5": {
        "m": 2.0, "S": 0.25, "b": None, "AR": 5.6, "e": 0.8,
        "C_L_alpha": 4.3, "C_D0": 0.035, "k": None, "k_alpha": None,
        "rho": 1.225, "V_cruise": 11.7, "q": None,
        "alpha_max_deg": 20.0, "inertia_diag": [0.02, 0.03, 0.05],
    },
}


class PresetDatabase:
    """Nominal aircraft loaded from YAML."""

    def __init__(self, table_path: Optional[str] = None):
        """
        Initialize the database.

        Args:
            table_path: Path to the YAML preset table. Defaults to config/aero_presets.yaml
        """
        self.table_path = table_path or self._get_default_table_path()
        self.presets: Dict[PresetId, AircraftPreset] = {}
        self._load_table()

    def _get_default_table_path(self) -> str:
        """Get default path to the preset table."""
        return str(Path(__file__).parent.parent.parent / "config" / "aero_presets.yaml")

    def _load_table(self):
        """Load all presets."""
        try:
            with open(self.table_path, "r") as f:
                table = yaml.safe_load(f) or {}
            rows = table.get("presets", {})
        except FileNotFoundError:
            # Use hardcoded defaults if YAML not found
            logger.warning("preset table %s not found, using built-in values", self.table_path)
            rows = DEFAULT_PRESETS

        for key, row in rows.items():
            try:
                preset_id = PresetId(key)
            except ValueError:
                logger.warning("ignoring unknown preset '%s' in %s", key, self.table_path)
                continue
            self.presets[preset_id] = preset_from_dict(row, preset_id)

    def get(self, preset_id: Union[PresetId, str]) -> AircraftPreset:
        """
        Look up a preset.

        Args:
            preset_id: PresetId or its string value ("ClassA", "ClassB", "Paper5")

        Returns:
            AircraftPreset

        Raises:
            PresetError: If the id is unknown
        """
        key = parse_preset_id(preset_id)
        if key not in self.presets:
            raise PresetError(f"preset '{key.value}' is not defined in {self.table_path}")
        return self.presets[key]

    def available(self) -> List[str]:
        """Get list of defined preset ids."""
        return [key.value for key in self.presets]


def parse_preset_id(preset_id: Union[PresetId, str]) -> PresetId:
    """Convert a string id to PresetId."""
    if isinstance(preset_id, PresetId):
        return preset_id
    try:
        return PresetId(str(preset_id))
    except ValueError:
        valid = ", ".join(p.value for p in PresetId)
        raise PresetError(f"unknown preset '{preset_id}' (valid: {valid})") from None


def preset_from_dict(row: Dict, preset_id: Optional[PresetId] = None) -> AircraftPreset:
    """
    Build an AircraftPreset from a table row or an exported JSON object.

    Null derived entries (b, k, k_alpha, q) are computed from AR, e, S,
    C_L_alpha and V_cruise.

    Raises:
        PresetError: If a required key is missing or a value is invalid
    """
    try:
        m = float(row["m"])
        S = float(row["S"])
        AR = float(row["AR"])
        e = float(row["e"])
        a = float(row["C_L_alpha"])
        C_D0 = float(row["C_D0"])
        rho = float(row["rho"])
        V = float(row["V_cruise"])
    except KeyError as exc:
        raise PresetError(f"preset is missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise PresetError(f"preset has a non-numeric entry: {exc}") from exc

    b = _or_derived(row.get("b"), lambda: math.sqrt(AR * S))
    k = _or_derived(row.get("k"), lambda: induced_factor(AR, e))
    k_alpha = _or_derived(row.get("k_alpha"), lambda: k_alpha_of(k, a))
    q = _or_derived(row.get("q"), lambda: 0.5 * rho * V * V)
    c_bar = _or_derived(row.get("c_bar"), lambda: S / b)

    if "I_B" in row:
        inertia = np.array(row["I_B"], dtype=float)
    else:
        inertia = np.diag(np.array(row.get("inertia_diag", [1.0, 1.0, 1.0]), dtype=float))

    name = row.get("name") or (preset_id.value if preset_id else "custom")
    if preset_id is None:
        preset_id = parse_preset_id(name)

    try:
        params = AircraftParams(
            m=m,
            I_B=inertia,
            rho=rho,
            S=S,
            b=b,
            c_bar=c_bar,
            alpha_max=math.radians(float(row.get("alpha_max_deg", 15.0))),
            name=name,
        )
        polar = AeroPolar(a=a, C_D0=C_D0, k=k, k_alpha=k_alpha)
    except ValueError as exc:
        raise PresetError(f"preset '{name}' is invalid: {exc}") from exc

    return AircraftPreset(
        preset_id=preset_id,
        params=params,
        polar=polar,
        q=q,
        V_cruise=V,
        aspect_ratio=AR,
        oswald=e,
    )


def _or_derived(value, derive) -> float:
    return float(derive()) if value is None else float(value)


def preset_to_dict(preset: AircraftPreset) -> Dict:
    """
    Export a preset as a JSON-ready dict.

    The tabulated keys come first; name, c_bar, alpha_max_deg and I_B follow
    so the dict loads back into an identical preset.
    """
    params, polar = preset.params, preset.polar
    row = {
        "m": params.m,
        "S": params.S,
        "b": params.b,
        "AR": preset.aspect_ratio,
        "e": preset.oswald,
        "C_L_alpha": polar.a,
        "C_D0": polar.C_D0,
        "k": polar.k,
        "k_alpha": polar.k_alpha,
        "rho": params.rho,
        "V_cruise": preset.V_cruise,
        "q": preset.q,
    }
    row.update({
        "name": params.name,
        "c_bar": params.c_bar,
        "alpha_max_deg": math.degrees(params.alpha_max),
        "I_B": params.I_B.tolist(),
    })
    return row


# Global database instance (singleton pattern)
_db_instance: Optional[PresetDatabase] = None


def get_preset_database() -> PresetDatabase:
    """Get or create the global PresetDatabase instance."""
    global _db_instance
    if _db_instance is None:
        _db_instance = PresetDatabase()
    return _db_instance


def preset(class_id: Union[PresetId, str]) -> AircraftPreset:
    """Nominal aircraft, polar and cruise dynamic pressure for a preset id."""
    return get_preset_database().get(class_id)
