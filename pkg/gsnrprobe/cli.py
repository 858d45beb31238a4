"""CLI entry point for gsnrprobe."""

import logging
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Annotated, Any, Optional

import typer
from rich.console import Console
from rich.logging import RichHandler

from gsnrprobe import __version__
from gsnrprobe.b2b_fit import fit_b2b, standard_errors
from gsnrprobe.config import (
    DEFAULT_LAUNCH_POWER_DBM,
    DEFAULT_LAUNCH_REFERENCE_GHZ,
    ProbeSettings,
)
from gsnrprobe.exceptions import (
    ConfigurationError,
    ExtrapolationError,
    FitError,
    NonMonotonicFitError,
    SchemaError,
    ZeroDispersionError,
)
from gsnrprobe.experiment import build_default_scenario, run_experiment
from gsnrprobe.file_parsers import (
    parse_catalog,
    parse_fit,
    parse_probe_result,
    parse_samples,
    parse_scenario,
    parse_topology,
)
from gsnrprobe.link_model import LaunchSpec
from gsnrprobe.probe import run_probe
from gsnrprobe.recommender import compute_margins, recommend
from gsnrprobe.report import (
    dump_json,
    fit_to_json,
    probe_result_to_json,
    recommendation_to_json,
    render_fit_summary,
    render_margin_table,
    render_recommendation,
    scenario_to_json,
    write_experiment_report,
)
from gsnrprobe.transponder import default_catalog, default_probes, find_probe

app = typer.Typer(
    name="gsnrprobe",
    help="Estimate lightpath GSNR by channel probing and recommend transponder configurations",
    no_args_is_help=True,
)

console = Console()
err_console = Console(stderr=True)

logger = logging.getLogger(__name__)


def version_callback(value: bool) -> None:
    """Print version and exit."""
    if value:
        console.print(f"gsnrprobe version {__version__}")
        raise typer.Exit()


def _configure_logging(verbose: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


def _handle_cli_exception(error: Exception) -> None:
    """Print a descriptive error with possible remediation hints."""
    err_console.print(f"[red]Error:[/red] {error}", soft_wrap=True, highlight=False)

    hints: list[str] = []

    if isinstance(error, FileNotFoundError):
        hints.append("Verify the path exists and that gsnrprobe has permission to read it.")
    elif isinstance(error, SchemaError):
        hints.append("Check the document against the schemas documented in README.md.")
        if "sample" in str(error):
            hints.append("B2B sample files are CSV with the header 'osnr_db,q_db'.")
    elif isinstance(error, ExtrapolationError):
        hints.append(
            f"The nearest characterized point is {error.nearest_osnr_db:.2f} dB OSNR; "
            "widen the B2B sweep or pass --clamp to use it."
        )
    elif isinstance(error, NonMonotonicFitError):
        hints.append(
            f"Restrict the B2B samples to one side of {error.crossing_db:.2f} dB OSNR."
        )
    elif isinstance(error, FitError):
        hints.append("Provide at least 4 samples spanning 3 dB of OSNR or more.")
    elif isinstance(error, ZeroDispersionError):
        hints.append("Use a dispersion-uncompensated span (beta2_ps2_per_km != 0).")
    elif isinstance(error, ConfigurationError) and "unknown" in str(error):
        hints.append("Names are case-sensitive; the message lists the known ones.")

    if hints:
        err_console.print("[yellow]Hints:[/yellow]")
        for hint in hints:
            err_console.print(f"  • {hint}", soft_wrap=True, highlight=False)

    raise typer.Exit(1)


def _abort() -> None:
    err_console.print("[yellow]Aborted by user.[/yellow]")
    raise typer.Exit(1)


@app.callback()
def main(
    version: Annotated[
        Optional[bool],
        typer.Option("--version", "-v", callback=version_callback, is_eager=True,
                     help="Show version and exit"),
    ] = None,
    verbose: Annotated[
        int,
        typer.Option("--verbose", "-V", count=True, help="Log more (-V info, -VV debug)"),
    ] = 0,
) -> None:
    """Channel probing toolkit for coherent optical lightpaths."""
    _configure_logging(verbose)


@app.command()
def characterize(
    b2b_csv: Annotated[Path, typer.Argument(help="B2B samples CSV (osnr_db,q_db)")],
    fit_json: Annotated[Path, typer.Argument(help="Where to write the fit JSON")],
    probe: Annotated[
        Optional[str],
        typer.Option(help="Probe setting the samples belong to (recorded in the fit)"),
    ] = None,
    q_sigma: Annotated[
        Optional[float],
        typer.Option(help="Known Q noise sigma in dB (default: estimated from residuals)"),
    ] = None,
) -> None:
    """Fit a back-to-back Q-over-OSNR characterization."""
    try:
        samples = parse_samples(b2b_csv)
        fit = fit_b2b(samples)
        errors = standard_errors(samples, q_sigma)
        config = find_probe(default_probes(), probe) if probe else None
        with open(fit_json, "w", encoding="utf-8") as f:
            f.write(dump_json(fit_to_json(fit, config, errors)))
            f.write("\n")
        render_fit_summary(fit, console, errors)
        console.print(f"[dim]Fit written to:[/dim] {fit_json}")
    except typer.Exit:
        raise
    except KeyboardInterrupt:
        _abort()
    except Exception as e:
        _handle_cli_exception(e)


@app.command()
def probe(
    topology: Annotated[Path, typer.Argument(help="Topology JSON")],
    fit_json: Annotated[Path, typer.Argument(help="Fit JSON from 'characterize'")],
    probe_name: Annotated[
        Optional[str],
        typer.Option("--probe", help="Probe setting (PL1-PL4; default: the fit's probe or PL2)"),
    ] = None,
    path_id: Annotated[
        Optional[str],
        typer.Option("--path", help="Lightpath id (default: first lightpath)"),
    ] = None,
    slot_id: Annotated[
        Optional[str],
        typer.Option("--slot", help="Slot id (default: the lightpath's slot)"),
    ] = None,
    seed: Annotated[int, typer.Option(help="Seed of the Q readout noise")] = 0,
    noise: Annotated[
        Optional[float],
        typer.Option(help="Q noise sigma in dB"),
    ] = None,
    penalty: Annotated[
        Optional[float],
        typer.Option(help="Implementation penalty of the probing module in dB"),
    ] = None,
    power_dbm: Annotated[
        Optional[float],
        typer.Option(help="Launch power in dBm over the probe's symbol rate"),
    ] = None,
    module_bias: Annotated[
        float,
        typer.Option(help="Inter-module bias added to the GOSNR estimate in dB"),
    ] = 0.0,
    clamp: Annotated[
        bool,
        typer.Option(help="Clamp out-of-range Q to the nearest characterized OSNR"),
    ] = False,
    out: Annotated[
        Optional[Path],
        typer.Option(help="Also write the probe result JSON to this file"),
    ] = None,
) -> None:
    """Probe a slot on a lightpath and print the ProbeResult JSON."""
    try:
        settings = ProbeSettings()
        topo = parse_topology(topology)
        fit, fitted_probe = parse_fit(fit_json)

        if probe_name is None:
            config = fitted_probe or find_probe(default_probes(), "PL2")
        else:
            config = find_probe(default_probes(), probe_name)
            if fitted_probe is not None and fitted_probe.name != config.name:
                logger.warning("fit characterizes %s but probing with %s",
                               fitted_probe.name, config.name)

        lightpath_id = path_id or next(iter(topo.lightpaths), None)
        if lightpath_id is None:
            raise ConfigurationError("topology has no lightpaths")
        lightpath = topo.lightpath(lightpath_id)
        slot = topo.slot(slot_id) if slot_id else topo.slot_of(lightpath_id)

        if power_dbm is not None:
            launch = LaunchSpec.from_power_dbm(power_dbm, config.symbol_rate_gbd)
        elif topo.launch is not None:
            launch = topo.launch.with_bandwidth(config.symbol_rate_gbd)
        else:
            launch = LaunchSpec.from_power_dbm(
                DEFAULT_LAUNCH_POWER_DBM, DEFAULT_LAUNCH_REFERENCE_GHZ
            ).with_bandwidth(config.symbol_rate_gbd)

        result = run_probe(
            lightpath,
            config,
            slot,
            launch,
            fit,
            settings.q_noise_sigma_db if noise is None else noise,
            seed,
            impl_penalty_db=settings.probe_penalty_db if penalty is None else penalty,
            module_bias_db=module_bias,
            clamp=clamp,
        )
        text = dump_json(probe_result_to_json(result))
        if out is not None:
            with open(out, "w", encoding="utf-8") as f:
                f.write(text)
                f.write("\n")
        typer.echo(text)
    except typer.Exit:
        raise
    except KeyboardInterrupt:
        _abort()
    except Exception as e:
        _handle_cli_exception(e)


@app.command(name="recommend")
def recommend_cmd(
    probe_result: Annotated[Path, typer.Argument(help="Probe result JSON")],
    catalog: Annotated[
        Optional[Path],
        typer.Option(help="Catalog JSON (default: built-in 100G-400G catalog)"),
    ] = None,
    operating_margin: Annotated[
        float,
        typer.Option(help="Operating margin in dB a configuration must clear"),
    ] = 0.0,
    json_output: Annotated[
        bool,
        typer.Option("--json", help="Print the recommendation as JSON instead of tables"),
    ] = False,
) -> None:
    """Compute GSNR margins and recommend the best configuration."""
    try:
        result = parse_probe_result(probe_result)
        specs = parse_catalog(catalog) if catalog else default_catalog()
        entries = compute_margins(result.estimated_gsnr_db, specs, operating_margin)
        recommendation = recommend(entries, operating_margin)
        if json_output:
            typer.echo(dump_json(recommendation_to_json(recommendation, result.estimated_gsnr_db)))
            return
        console.print(
            f"Estimated GSNR: [bold]{result.estimated_gsnr_db:.2f} dB[/bold] "
            f"({result.probe.name}, {result.probe.symbol_rate_gbd:g} GBd)"
        )
        render_margin_table(recommendation, console)
        render_recommendation(recommendation, console)
    except typer.Exit:
        raise
    except KeyboardInterrupt:
        _abort()
    except Exception as e:
        _handle_cli_exception(e)


@app.command()
def experiment(
    scenario: Annotated[
        Optional[Path],
        typer.Option(help="Scenario JSON (default: built-in six-path scenario)"),
    ] = None,
    out_dir: Annotated[Path, typer.Option(help="Directory for report files")] = Path("results"),
    seed: Annotated[
        Optional[int],
        typer.Option(help="Master seed (default: the scenario's, 0 if unset)"),
    ] = None,
    seeds: Annotated[
        Optional[int],
        typer.Option(help="Number of replicates per path and probe"),
    ] = None,
    noise: Annotated[Optional[float], typer.Option(help="Q noise sigma in dB")] = None,
    operating_margin: Annotated[
        Optional[float],
        typer.Option(help="Operating margin in dB"),
    ] = None,
    workers: Annotated[int, typer.Option(help="Maximum number of worker threads")] = 4,
    figure2: Annotated[
        bool,
        typer.Option("--figure2", help="Also write margin-vs-length rows to figure2.csv"),
    ] = False,
    fine_tune: Annotated[
        bool,
        typer.Option("--fine-tune", help="Step each recommendation down until it verifies"),
    ] = False,
    timestamp: Annotated[
        bool,
        typer.Option("--timestamp", help="Embed the generation time in report.json"),
    ] = False,
    write_scenario: Annotated[
        Optional[Path],
        typer.Option(help="Write the effective scenario JSON to this file"),
    ] = None,
) -> None:
    """Replay the probing campaign over every scenario path."""
    try:
        base = parse_scenario(scenario) if scenario else build_default_scenario()
        changes: dict[str, Any] = {}
        if seed is not None:
            changes["master_seed"] = seed
        if seeds is not None:
            changes["seeds"] = tuple(range(seeds))
        if operating_margin is not None:
            changes["operating_margin_db"] = operating_margin
        if noise is not None:
            changes["settings"] = base.settings.with_overrides(q_noise_sigma_db=noise)
        if fine_tune:
            changes["fine_tuning"] = True
        effective = replace(base, **changes) if changes else base

        if write_scenario is not None:
            with open(write_scenario, "w", encoding="utf-8") as f:
                f.write(dump_json(scenario_to_json(effective)))
                f.write("\n")

        report = run_experiment(effective, max_workers=workers)
        generated_at = datetime.now(timezone.utc).isoformat() if timestamp else None
        exit_code = write_experiment_report(report, out_dir, console, figure2, generated_at)
        raise typer.Exit(exit_code)
    except typer.Exit:
        raise
    except KeyboardInterrupt:
        _abort()
    except Exception as e:
        _handle_cli_exception(e)


if __name__ == "__main__":
    app()
