"""Command-line interface for inverse flight dynamics."""

import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from enum import IntEnum
from itertools import repeat
from pathlib import Path
from typing import Callable, Dict, List, Optional

import click
import pandas as pd
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from .. import __version__

console = Console()

logger = logging.getLogger(__name__)

DEFAULT_SCENARIO = Path(__file__).parent.parent.parent / "config" / "scenarios" / "paper5.json"


class ExitCode(IntEnum):
    """Process exit codes."""
    OK = 0
    VERIFICATION_FAILED = 1
    INPUT_ERROR = 2
    INFEASIBLE = 3


def _fail(code: ExitCode, message: str):
    console.print(f"[red]Error: {message}[/red]")
    sys.exit(int(code))


def _run_config(**kwargs):
    from ..parsers import RunConfig

    try:
        return RunConfig(**kwargs)
    except ValidationError as exc:
        _fail(ExitCode.INPUT_ERROR, "; ".join(e["msg"] for e in exc.errors()))


def _grid(ctx, param, value):
    """Click callback turning grid text into a list of floats."""
    from ..parsers import ScenarioError, parse_grid

    if value is None:
        return None
    try:
        return parse_grid(value)
    except ScenarioError as exc:
        raise click.BadParameter(str(exc)) from exc


def _parallel_map(fn: Callable, workers: int, *iterables) -> List:
    """map in grid order, on a process pool when workers > 1."""
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, *iterables))
    return list(map(fn, *iterables))


def _load_scenario_or_exit(path):
    from ..parsers import ScenarioError, load_scenario

    try:
        return load_scenario(path)
    except ScenarioError as exc:
        _fail(ExitCode.INPUT_ERROR, str(exc))


def _write_table(df: pd.DataFrame, out: Optional[str], fmt: str):
    from ..parsers import records, write_frame, write_json

    if out is None:
        return
    if fmt == "json":
        path = write_json(records(df), out)
    else:
        path = write_frame(df, out)
    console.print(f"[green]✓ Saved to: {path}[/green]")


@click.group()
@click.version_option(version=__version__)
@click.option("--verbose", "-v", count=True, help="Increase log detail (-v info, -vv debug)")
def cli(verbose):
    """Inverse flight dynamics on SO(3).

    Reconstruct attitude, thrust and control moments from a flight path,
    analyse tethered circular flight and verify the result by forward
    simulation.
    """
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
    )
    logging.getLogger("src").setLevel(level)


# =============================================================================
# tether
# =============================================================================

@cli.command()
@click.option(
    "--scenario", "-s",
    default=str(DEFAULT_SCENARIO),
    type=click.Path(),
    help="Scenario JSON (default: bundled Paper5 scenario)"
)
@click.option(
    "--grid-F-ext", "grid_F_ext",
    default="10:16:1.5",
    callback=_grid,
    help="Tensions in N, start:stop:step or comma list (default: 10:16:1.5)"
)
@click.option("--out", "-o", default=None, type=click.Path(), help="Output file")
@click.option("--format", "fmt", default="csv", type=click.Choice(["csv", "json"]), help="Output format")
@click.option("--workers", default=1, type=int, help="Worker processes")
def tether(scenario, grid_F_ext, out, fmt, workers):
    """Bank angle, trim and regime for a range of tether tensions."""
    from ..engine.tethered_parallel import tension_row
    from ..models import TetherScenarioError
    from ..parsers import ScenarioError

    config = _run_config(
        subcommand="tether", scenario=scenario, out=out, grid_F_ext=grid_F_ext,
        format=fmt, workers=workers,
    )
    scenario_file = _load_scenario_or_exit(config.scenario)
    try:
        base = scenario_file.to_scenario()
        params, polar = scenario_file.aircraft()
    except (TetherScenarioError, ScenarioError, ValueError) as exc:
        _fail(ExitCode.INPUT_ERROR, str(exc))

    console.print(Panel.fit(
        f"[bold blue]Tethered parallel[/bold blue]  L={base.L:g} m  "
        f"theta={base.theta_deg:.3f} deg  v0={base.v0:g} m/s",
        border_style="blue"
    ))

    scenarios = [base.with_tension(F) for F in config.grid_F_ext]
    try:
        rows = _parallel_map(tension_row, config.workers, scenarios, repeat(polar), repeat(params))
    except TetherScenarioError as exc:
        _fail(ExitCode.INFEASIBLE, str(exc))

    table = Table(title="Tension sweep")
    for column in ("F_ext [N]", "mu [deg]", "alpha [deg]", "T [N]", "regime", "feasible"):
        table.add_column(column, justify="right")
    for row in rows:
        table.add_row(
            f"{row.F_ext:.3f}", f"{row.mu_deg:.3f}", f"{row.alpha_deg:.3f}",
            f"{row.T:.3f}", row.regime.value, "yes" if row.feasible else f"no ({row.reason})",
        )
    console.print(table)
    console.print(f"Zero-bank tension: [cyan]{rows[0].F_ext_zero_bank:.4f} N[/cyan]")

    _write_table(pd.DataFrame([row.to_dict() for row in rows]), config.out, fmt)


# =============================================================================
# sweep
# =============================================================================

def _sweep_block(kappa: float, theta_deg: float, etas: List[float]) -> List[Dict]:
    """Bank angle over eta at one (kappa, theta)."""
    from ..engine.tethered_parallel import bank_angle_dimensionless, classify_regime
    from ..models import TetherScenarioError

    theta = math.radians(theta_deg)
    rows = []
    for eta in etas:
        try:
            mu_deg = math.degrees(bank_angle_dimensionless(kappa, eta, theta))
        except TetherScenarioError:
            mu_deg = math.nan
        rows.append({
            "eta": eta,
            "theta_deg": theta_deg,
            "kappa": kappa,
            "mu_deg": mu_deg,
            "regime": classify_regime(kappa, eta, theta).value,
        })
    return rows


def locus_path(out: Path) -> Path:
    """Path of the zero-bank locus file written next to a sweep table."""
    out = Path(out)
    return out.with_name(f"{out.stem}_locus{out.suffix or '.csv'}")


@cli.command()
@click.option(
    "--grid-eta",
    default="0:3:0.1",
    callback=_grid,
    help="Normalized tensions, start:stop:step or comma list"
)
@click.option(
    "--grid-theta-deg",
    default="10:90:5",
    callback=_grid,
    help="Colatitudes in deg, start:stop:step or comma list"
)
@click.option(
    "--grid-kappa", "--kappa", "grid_kappa",
    default="0.6977",
    callback=_grid,
    help="Dimensionless speeds v0^2/(gL)"
)
@click.option("--out", "-o", default=None, type=click.Path(), help="Output table (locus file beside it)")
@click.option("--format", "fmt", default="csv", type=click.Choice(["csv", "json"]), help="Output format")
@click.option("--workers", default=1, type=int, help="Worker processes")
def sweep(grid_eta, grid_theta_deg, grid_kappa, out, fmt, workers):
    """Bank-angle map over (eta, theta, kappa) with the zero-bank locus."""
    from ..engine.tethered_parallel import zero_bank_eta

    config = _run_config(
        subcommand="sweep", out=out, grid_eta=grid_eta, grid_theta_deg=grid_theta_deg,
        grid_kappa=grid_kappa, format=fmt, workers=workers,
    )
    for theta_deg in config.grid_theta_deg:
        if not 0 < theta_deg <= 90:
            _fail(ExitCode.INPUT_ERROR, f"colatitude {theta_deg:g} deg is outside (0, 90]")

    pairs = [(k, th) for k in config.grid_kappa for th in config.grid_theta_deg]
    blocks = _parallel_map(
        _sweep_block, config.workers,
        [k for k, _ in pairs], [th for _, th in pairs], repeat(config.grid_eta),
    )
    table_rows = [row for block in blocks for row in block]
    locus_rows = [
        {"theta_deg": th, "eta_star": zero_bank_eta(k, math.radians(th)), "kappa": k}
        for k, th in pairs
    ]

    console.print(Panel.fit(
        f"[bold blue]Bank-angle sweep[/bold blue]  {len(table_rows)} points, "
        f"{len(locus_rows)} locus points",
        border_style="blue"
    ))
    summary = Table(title="Regimes")
    summary.add_column("regime")
    summary.add_column("points", justify="right")
    counts = pd.Series([row["regime"] for row in table_rows]).value_counts()
    for regime, count in counts.items():
        summary.add_row(str(regime), str(int(count)))
    console.print(summary)

    _write_table(pd.DataFrame(table_rows), config.out, fmt)
    if config.out is not None:
        _write_table(pd.DataFrame(locus_rows), str(locus_path(config.out)), fmt)


# =============================================================================
# invert
# =============================================================================

@cli.command()
@click.option(
    "--trajectory", "-t",
    required=True,
    type=click.Path(),
    help="Trajectory CSV (t,px..az[,fx..fz][,taux..tauz][,wx..wz])"
)
@click.option("--preset", "-p", "preset_id", default="Paper5", help="Aircraft preset")
@click.option("--out", "-o", default=None, type=click.Path(), help="Solution file")
@click.option("--format", "fmt", default="csv", type=click.Choice(["csv", "json"]), help="Output format")
@click.option("--g", "gravity", default=None, type=float, help="Gravity in m/s^2 (default: solver config)")
def invert(trajectory, preset_id, out, fmt, gravity):
    """Reconstruct attitude, thrust and moment coefficients along a trajectory."""
    from ..engine import PresetError, invert_trajectory, preset
    from ..models import InversionOptions
    from ..parsers import ParseError, load_trajectory, solution_frame

    config = _run_config(subcommand="invert", trajectory=trajectory, out=out, format=fmt)
    try:
        nominal = preset(preset_id)
    except PresetError as exc:
        _fail(ExitCode.INPUT_ERROR, str(exc))
    try:
        samples = load_trajectory(config.trajectory)
    except ParseError as exc:
        where = f" (line {exc.line_number})" if exc.line_number else ""
        _fail(ExitCode.INPUT_ERROR, f"{exc}{where}")
    if len(samples) < 3:
        _fail(ExitCode.INPUT_ERROR, "at least 3 samples are needed")

    solutions = invert_trajectory(
        samples, nominal.params, nominal.polar, options=InversionOptions(g=gravity)
    )
    flagged = sum(1 for s in solutions if not s.flags.is_feasible)

    table = Table(title="Inversion summary")
    table.add_column("Item", style="cyan")
    table.add_column("Value", justify="right")
    table.add_row("Samples", str(len(solutions)))
    table.add_row("Infeasible", str(flagged))
    table.add_row("Preset", nominal.preset_id.value)
    console.print(table)

    if config.out is not None:
        try:
            _write_table(solution_frame(solutions), config.out, fmt)
        except OSError as exc:
            _fail(ExitCode.INPUT_ERROR, f"cannot write {config.out}: {exc}")


# =============================================================================
# verify
# =============================================================================

@cli.command()
@click.option(
    "--scenario", "-s",
    default=str(DEFAULT_SCENARIO),
    type=click.Path(),
    help="Scenario JSON (default: bundled Paper5 scenario)"
)
@click.option("--preset", "-p", "preset_id", default=None, help="Override the scenario preset")
@click.option("--dt", default=1e-3, type=float, help="Integration step in s")
@click.option("--orbits", default=1.0, type=float, help="Number of orbits")
@click.option("--max-pos-err", default=1e-2, type=float, help="Position threshold in m")
@click.option("--max-att-err", default=1e-3, type=float, help="Attitude threshold in rad")
@click.option("--out", "-o", default=None, type=click.Path(), help="Error report JSON")
@click.option("--telemetry", default=None, type=click.Path(), help="Per-step telemetry CSV")
def verify(scenario, preset_id, dt, orbits, max_pos_err, max_att_err, out, telemetry):
    """Integrate the inverted inputs forward and compare with the orbit."""
    from ..engine import IntegrationError, InverseDynamicsError, roundtrip_run, telemetry_frame
    from ..models import TetherScenarioError
    from ..parsers import ScenarioError, write_frame, write_json

    config = _run_config(subcommand="verify", scenario=scenario, out=out, dt=dt, n_orbits=orbits)
    scenario_file = _load_scenario_or_exit(config.scenario)
    if preset_id is not None:
        scenario_file = scenario_file.model_copy(update={"preset": preset_id})
    try:
        tethered = scenario_file.to_scenario()
        params, polar = scenario_file.aircraft()
    except (TetherScenarioError, ScenarioError, ValueError) as exc:
        _fail(ExitCode.INPUT_ERROR, str(exc))

    try:
        report, result, reference = roundtrip_run(tethered, params, polar, config.dt, config.n_orbits)
    except InverseDynamicsError as exc:
        _fail(ExitCode.INFEASIBLE, str(exc))
    except IntegrationError as exc:
        _fail(ExitCode.VERIFICATION_FAILED, f"{exc} (last finite time {exc.last_time:.6g} s)")

    passed = report.within(max_pos_err, max_att_err)
    table = Table(title="Round-trip verification")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right")
    table.add_row("dt [s]", f"{report.dt:g}")
    table.add_row("steps", str(report.n_steps))
    table.add_row("max position error [m]", f"{report.max_pos_err:.3e}")
    table.add_row("max attitude error [rad]", f"{report.max_att_err:.3e}")
    table.add_row("max speed error [m/s]", f"{report.max_speed_err:.3e}")
    console.print(table)

    if config.out is not None:
        write_json({**report.to_dict(), "passed": passed}, config.out)
    if telemetry is not None:
        write_frame(telemetry_frame(result, reference), telemetry)

    if not passed:
        console.print("[red]✗ Round trip exceeds the thresholds[/red]")
        sys.exit(int(ExitCode.VERIFICATION_FAILED))
    console.print("[green]✓ Round trip within thresholds[/green]")


# =============================================================================
# presets
# =============================================================================

@cli.command()
@click.option("--preset", "-p", "preset_ids", multiple=True, help="Preset id (repeatable, default: all)")
@click.option("--out", "-o", default=None, type=click.Path(), help="Output JSON")
def presets(preset_ids, out):
    """Export the nominal aircraft tables as JSON."""
    from ..engine import PresetError, get_preset_database, preset_to_dict
    from ..parsers import write_json

    database = get_preset_database()
    ids = list(preset_ids) or database.available()
    try:
        dump = {pid: preset_to_dict(database.get(pid)) for pid in ids}
    except PresetError as exc:
        _fail(ExitCode.INPUT_ERROR, str(exc))

    table = Table(title="Presets")
    for column in ("id", "m [kg]", "S [m^2]", "C_L_alpha", "k", "k_alpha", "q [Pa]"):
        table.add_column(column, justify="right")
    for pid, row in dump.items():
        table.add_row(
            pid, f"{row['m']:g}", f"{row['S']:g}", f"{row['C_L_alpha']:.3f}",
            f"{row['k']:.4f}", f"{row['k_alpha']:.3f}", f"{row['q']:.1f}",
        )
    console.print(table)

    if out is not None:
        path = write_json(dump, out)
        console.print(f"[green]✓ Saved to: {path}[/green]")


def main():
    """Main entry point."""
    cli()


if __name__ == "__main__":
    main()
