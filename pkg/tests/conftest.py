"""Shared fixtures."""

import pytest

from src.engine import preset, reset_settings
from src.models import AeroPolar, TetherScenario


PAPER5_L = 20.0          # m
PAPER5_R = 18.544        # m
PAPER5_V0 = 11.7         # m/s


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Every test starts from the bundled solver config."""
    monkeypatch.delenv("IFD_EPS_AIRSPEED", raising=False)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def paper5():
    """The 2 kg tethered demonstrator."""
    return preset("Paper5")


@pytest.fixture
def free_orbit():
    """Paper5 circle without tether tension."""
    return TetherScenario.from_radius(PAPER5_L, PAPER5_R, PAPER5_V0, F_ext=0.0)


@pytest.fixture
def tethered_orbit():
    """Paper5 circle at 16 N tension."""
    return TetherScenario.from_radius(PAPER5_L, PAPER5_R, PAPER5_V0, F_ext=16.0)


@pytest.fixture
def zero_bank_orbit(free_orbit):
    """Paper5 circle at the wings-level tension."""
    F_star = free_orbit.m * free_orbit.v0 ** 2 * free_orbit.L / free_orbit.r ** 2
    return free_orbit.with_tension(F_star)


@pytest.fixture
def glider_polar():
    """Small-angle polar of a typical small UAV."""
    return AeroPolar(a=4.3, C_D0=0.035, k=0.0711)


@pytest.fixture
def inert_polar():
    """Polar whose coefficient maps are identically zero."""
    return AeroPolar(a=1.0, C_D0=1.0, k=1.0, cl_fn=lambda alpha: 0.0, cd_fn=lambda alpha: 0.0)
