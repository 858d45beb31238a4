"""Render results as rich tables and write JSON/CSV reports."""

import csv
import json
import math
from pathlib import Path
from typing import Any, Optional, Sequence

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from gsnrprobe.b2b_fit import QuadraticFit
from gsnrprobe.config import ProbeSettings
from gsnrprobe.experiment import (
    ACCURACY_BOUND_DB,
    DeviationRow,
    ExperimentReport,
    PathReport,
    Scenario,
    figure2_rows,
    most_chosen,
    most_fine_tuned,
)
from gsnrprobe.file_parsers.samples import write_samples
from gsnrprobe.link_model import FiberSpan, LaunchSpec, SpectrumSlot
from gsnrprobe.probe import ProbeResult
from gsnrprobe.recommender import Classification, MarginEntry, Recommendation
from gsnrprobe.transponder import ModFormatSpec, TransponderConfig

REPORT_VERSION = "1.0"

_CLASS_STYLE = {
    Classification.TRUE_POSITIVE: "green",
    Classification.FALSE_POSITIVE: "bold red",
    Classification.TRUE_NEGATIVE: "dim",
    Classification.FALSE_NEGATIVE: "yellow",
    Classification.UNVERIFIED: "white",
}


def format_db(value: Optional[float], digits: int = 2) -> str:
    if value is None or math.isnan(value):
        return "-"
    if math.isinf(value):
        return "inf"
    return f"{value:.{digits}f}"


def _finite_or_none(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return value


def dump_json(data: Any) -> str:
    return json.dumps(data, indent=2)


def config_to_json(config: TransponderConfig) -> dict[str, Any]:
    return {
        "name": config.name,
        "bits_per_symbol": config.bits_per_symbol,
        "symbol_rate_gbd": config.symbol_rate_gbd,
        "line_rate_gbps": config.line_rate_gbps,
    }


def spec_to_json(spec: ModFormatSpec) -> dict[str, Any]:
    return {
        **config_to_json(spec.config),
        "required_gsnr_typical_db": spec.required_gsnr_typical_db,
        "required_gsnr_worst_db": spec.required_gsnr_worst_db,
    }


def slot_to_json(slot: SpectrumSlot) -> dict[str, Any]:
    return {"center_freq_thz": slot.center_freq_thz, "width_ghz": slot.width_ghz}


def launch_to_json(launch: LaunchSpec) -> dict[str, Any]:
    return {
        "psd_w_per_hz": launch.psd_w_per_hz,
        "signal_bandwidth_ghz": launch.signal_bandwidth_ghz,
    }


def span_to_json(span: FiberSpan) -> dict[str, Any]:
    data: dict[str, Any] = {
        "length_km": span.length_km,
        "attenuation_db_per_km": span.attenuation_db_per_km,
        "gamma_per_w_km": span.gamma_per_w_km,
        "beta2_ps2_per_km": span.beta2_ps2_per_km,
        "amp_gain_db": span.amp_gain_db,
        "amp_noise_figure_db": span.amp_noise_figure_db,
    }
    if span.extra_nli_psd_w_per_hz:
        data["extra_nli_psd_w_per_hz"] = span.extra_nli_psd_w_per_hz
    if span.allow_low_noise_figure:
        data["allow_low_noise_figure"] = True
    return data


def fit_to_json(fit: QuadraticFit, probe: Optional[TransponderConfig] = None,
                standard_errors: Optional[Sequence[float]] = None) -> dict[str, Any]:
    data: dict[str, Any] = {
        "a": fit.a,
        "b": fit.b,
        "c": fit.c,
        "osnr_min_db": fit.osnr_min_db,
        "osnr_max_db": fit.osnr_max_db,
        "residual_rms_db": fit.residual_rms_db,
        "max_abs_residual_db": fit.max_abs_residual_db,
    }
    if standard_errors is not None:
        data["standard_errors"] = [float(se) for se in standard_errors]
    if probe is not None:
        data["probe"] = config_to_json(probe)
    return data


def probe_result_to_json(result: ProbeResult) -> dict[str, Any]:
    return {
        "probe": config_to_json(result.probe),
        "slot": slot_to_json(result.slot),
        "measured_q_db": result.measured_q_db,
        "estimated_gosnr_db": result.estimated_gosnr_db,
        "estimated_gsnr_db": result.estimated_gsnr_db,
        "seed": result.seed,
        "path_id": result.path_id,
        "true_gsnr_db": result.true_gsnr_db,
    }


def margin_entry_to_json(entry: MarginEntry) -> dict[str, Any]:
    return {
        **spec_to_json(entry.spec),
        "margin_db": entry.margin_db,
        "predicted_feasible": entry.predicted_feasible,
        "actual_feasible": entry.actual_feasible,
        "classification": entry.classification.value,
    }


def recommendation_to_json(recommendation: Recommendation,
                           estimated_gsnr_db: Optional[float] = None) -> dict[str, Any]:
    if estimated_gsnr_db is None and recommendation.ranking:
        estimated_gsnr_db = recommendation.ranking[0].estimated_gsnr_db
    return {
        "estimated_gsnr_db": estimated_gsnr_db,
        "operating_margin_db": recommendation.operating_margin_db,
        "chosen": recommendation.chosen.name if recommendation.chosen else None,
        "ranking": [margin_entry_to_json(e) for e in recommendation.ranking],
    }


def settings_to_json(settings: ProbeSettings) -> dict[str, Any]:
    return {
        "q_noise_sigma_db": settings.q_noise_sigma_db,
        "plt_penalty_db": settings.plt_penalty_db,
        "module_offset_db": settings.module_offset_db,
        "module_bias_db": settings.module_bias_db,
        "b2b_osnr_min_db": settings.b2b_osnr_min_db,
        "b2b_osnr_max_db": settings.b2b_osnr_max_db,
        "b2b_step_db": settings.b2b_step_db,
        "clamp_extrapolation": settings.clamp_extrapolation,
        "txrx_backout_snr_db": settings.txrx_backout_snr_db,
    }


def _seeds_to_json(seeds: Sequence[int]) -> Any:
    if list(seeds) == list(range(seeds[0], seeds[0] + len(seeds))):
        return {"start": seeds[0], "count": len(seeds)}
    return list(seeds)


def scenario_to_json(scenario: Scenario) -> dict[str, Any]:
    """Scenario as a document ``parse_scenario`` reads back unchanged."""
    span_ids: dict[FiberSpan, str] = {}
    slot_ids: dict[SpectrumSlot, str] = {}
    lightpaths = []
    for scenario_path in scenario.paths:
        runs: list[dict[str, Any]] = []
        for span in scenario_path.path.spans:
            span_id = span_ids.setdefault(span, f"span-{len(span_ids) + 1}")
            if runs and runs[-1]["span"] == span_id:
                runs[-1]["count"] += 1
            else:
                runs.append({"span": span_id, "count": 1})
        slot_id = slot_ids.setdefault(scenario_path.slot, f"slot-{len(slot_ids) + 1}")
        lightpaths.append({
            "id": scenario_path.label,
            "spans": runs,
            "add_drop_loss_db": scenario_path.path.add_drop_loss_db,
            "loopback_count": scenario_path.path.loopback_count,
            "slot": slot_id,
            "synthetic": scenario_path.synthetic,
        })
    return {
        "spans": {span_id: span_to_json(span) for span, span_id in span_ids.items()},
        "slots": {slot_id: slot_to_json(slot) for slot, slot_id in slot_ids.items()},
        "lightpaths": lightpaths,
        "launch": launch_to_json(scenario.launch),
        "probes": [config_to_json(p) for p in scenario.probes],
        "catalog": [spec_to_json(s) for s in scenario.verification_catalog],
        "settings": settings_to_json(scenario.settings),
        "seeds": _seeds_to_json(scenario.seeds),
        "master_seed": scenario.master_seed,
        "reference_probe": scenario.reference_probe,
        "operating_margin_db": scenario.operating_margin_db,
        "threshold": scenario.threshold.value,
        "fine_tuning": scenario.fine_tuning,
    }


def _path_to_json(path_report: PathReport, report: ExperimentReport) -> dict[str, Any]:
    data: dict[str, Any] = {
        "label": path_report.label,
        "length_km": path_report.length_km,
        "synthetic": path_report.synthetic,
        "slot": slot_to_json(path_report.slot),
    }
    if path_report.failed:
        data["error"] = path_report.error
        return data
    probes = {}
    for probe in report.scenario.probes:
        errors = path_report.errors_db(probe.name)
        probes[probe.name] = {
            "true_gsnr_db": path_report.true_gsnr_db[probe.name],
            "mean_error_db": float(errors.mean()),
            "sigma_error_db": float(errors.std()),
            "max_abs_error_db": float(abs(errors).max()),
            "within_bound_fraction": float((abs(errors) <= ACCURACY_BOUND_DB).mean()),
        }
    entries = path_report.entries()
    data.update({
        "probes": probes,
        "most_chosen": most_chosen(path_report),
        "false_positives": path_report.count(Classification.FALSE_POSITIVE),
        "false_negatives": path_report.count(Classification.FALSE_NEGATIVE),
        "margins": [
            {
                "name": spec.name,
                "mean_margin_db": path_report.mean_margin_db(spec.name),
                "actual_feasible": path_report.actual_feasible(spec.name),
                "false_positive_runs": sum(
                    1 for e in entries
                    if e.spec.name == spec.name
                    and e.classification is Classification.FALSE_POSITIVE
                ),
            }
            for spec in report.scenario.verification_catalog
        ],
    })
    if report.scenario.fine_tuning:
        data["fine_tuning"] = {
            "most_chosen": most_fine_tuned(path_report),
            "per_seed": list(path_report.fine_tuned),
            "step_downs": path_report.step_downs(),
        }
    return data


def deviation_to_json(row: DeviationRow) -> dict[str, Any]:
    return {
        "path": row.path_label,
        "probe": row.probe,
        "mean_db": row.mean_db,
        "deviation_sigma_db": row.deviation_sigma_db,
        "estimate_sigma_db": row.estimate_sigma_db,
        "fit_slope": row.fit_slope,
    }


def experiment_to_json(report: ExperimentReport,
                       timestamp: Optional[str] = None) -> dict[str, Any]:
    """
    Convert an experiment report to JSON-serializable format.

    Args:
        report: Experiment report
        timestamp: Generation time to embed, omitted when None

    Returns:
        Dictionary in the report JSON schema
    """
    scenario = report.scenario
    summary = report.summary
    data: dict[str, Any] = {"version": REPORT_VERSION}
    if timestamp is not None:
        data["generated_at"] = timestamp
    data.update({
        "reference_probe": scenario.reference_probe,
        "master_seed": scenario.master_seed,
        "seed_count": len(scenario.seeds),
        "operating_margin_db": scenario.operating_margin_db,
        "threshold": scenario.threshold.value,
        "fine_tuning": scenario.fine_tuning,
        "settings": settings_to_json(scenario.settings),
        "summary": {
            "probe_runs": summary.probe_runs,
            "max_abs_error_db": _finite_or_none(summary.max_abs_error_db),
            "accuracy_bound_db": summary.accuracy_bound_db,
            "within_bound_fraction": summary.within_bound_fraction,
            "false_positives": summary.false_positives,
            "false_negatives": summary.false_negatives,
            "failed_paths": list(summary.failed_paths),
        },
        "characterizations": {
            name: fit_to_json(item.fit, item.probe)
            for name, item in report.characterizations.items()
        },
        "paths": [_path_to_json(p, report) for p in report.paths],
        "deviations": [deviation_to_json(row) for row in report.deviations],
    })
    return data


def _write_csv(file_path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    with open(file_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if value is None else value for value in row])


def write_probe_results_csv(results: Sequence[ProbeResult], file_path: Path) -> None:
    _write_csv(
        file_path,
        ("path_id", "probe", "seed", "slot_thz", "measured_q_db", "estimated_gosnr_db",
         "estimated_gsnr_db", "true_gsnr_db"),
        [
            (r.path_id, r.probe.name, r.seed, r.slot.center_freq_thz, r.measured_q_db,
             r.estimated_gosnr_db, r.estimated_gsnr_db, r.true_gsnr_db)
            for r in results
        ],
    )


def write_margins_csv(path_entries: Sequence[tuple[str, Sequence[MarginEntry]]],
                      file_path: Path) -> None:
    """One row per entry: path id, spec name, margin, predicted, actual, classification."""
    rows = []
    for path_id, entries in path_entries:
        for entry in entries:
            rows.append((
                path_id,
                entry.spec.name,
                entry.margin_db,
                entry.predicted_feasible,
                entry.actual_feasible,
                entry.classification.value,
            ))
    _write_csv(
        file_path,
        ("path_id", "spec", "margin_db", "predicted_feasible", "actual_feasible",
         "classification"),
        rows,
    )


def write_deviations_csv(rows: Sequence[DeviationRow], file_path: Path) -> None:
    _write_csv(
        file_path,
        ("path", "probe", "mean_db", "deviation_sigma_db", "estimate_sigma_db", "fit_slope"),
        [
            (r.path_label, r.probe, r.mean_db, r.deviation_sigma_db, r.estimate_sigma_db,
             r.fit_slope)
            for r in rows
        ],
    )


def write_figure2_csv(report: ExperimentReport, file_path: Path) -> None:
    _write_csv(
        file_path,
        ("path_length_km", "config_name", "margin_db", "actual_feasible"),
        figure2_rows(report),
    )


def render_fit_summary(fit: QuadraticFit, console: Console,
                       standard_errors: Optional[Sequence[float]] = None) -> None:
    table = Table(
        title="B2B Characterization",
        title_style="bold cyan",
        show_header=True,
        header_style="bold white on blue",
        border_style="blue",
    )
    table.add_column("Coefficient", style="cyan bold")
    table.add_column("Value", justify="right", style="green")
    table.add_column("Std. error", justify="right", style="yellow")
    for i, (name, value) in enumerate(zip("abc", fit.coefficients)):
        se = f"{standard_errors[i]:.3g}" if standard_errors is not None else "-"
        table.add_row(name, f"{value:.6g}", se)
    console.print(table)
    q_low, q_high = fit.q_interval
    console.print(
        f"Residual RMS: [bold]{fit.residual_rms_db:.3g} dB[/bold]   "
        f"max |residual|: {fit.max_abs_residual_db:.3g} dB"
    )
    console.print(
        f"Monotonic range: {fit.osnr_min_db:.2f} - {fit.osnr_max_db:.2f} dB OSNR "
        f"(Q {q_low:.2f} - {q_high:.2f} dB)"
    )


def render_margin_table(recommendation: Recommendation, console: Console) -> None:
    """Margins in ranking order, predicted-feasible entries first."""
    table = Table(
        title="GSNR Margins",
        title_style="bold cyan",
        show_header=True,
        header_style="bold white on blue",
        border_style="blue",
        padding=(0, 1),
    )
    table.add_column("#", justify="right", style="dim")
    table.add_column("Configuration", style="cyan bold", no_wrap=True)
    table.add_column("Required", justify="right", style="magenta")
    table.add_column("Margin", justify="right", style="green bold")
    table.add_column("Feasible", justify="center")
    table.add_column("Outcome", style="white")

    for rank, entry in enumerate(recommendation.ranking, start=1):
        chosen = recommendation.chosen is not None and entry.spec == recommendation.chosen
        name = f"★ {entry.spec.name}" if chosen else entry.spec.name
        feasible = "[green]yes[/green]" if entry.predicted_feasible else "[red]no[/red]"
        style = _CLASS_STYLE[entry.classification]
        table.add_row(
            str(rank),
            name,
            f"{entry.spec.required_gsnr_typical_db:.2f}",
            format_db(entry.margin_db),
            feasible,
            f"[{style}]{entry.classification.value}[/{style}]",
        )
    console.print(table)


def render_recommendation(recommendation: Recommendation, console: Console) -> None:
    if recommendation.chosen is None:
        console.print(Panel(
            f"no feasible configuration at operating margin "
            f"{recommendation.operating_margin_db:.2f} dB",
            title="Recommendation",
            border_style="yellow",
        ))
        return
    entry = recommendation.chosen_entry
    assert entry is not None
    config = entry.spec.config
    console.print(Panel(
        f"[bold green]{config.name}[/bold green]\n"
        f"{config.line_rate_gbps:g} Gbit/s, {config.format_label}, "
        f"{config.symbol_rate_gbd:g} GBd\n"
        f"margin {entry.margin_db:.2f} dB (operating margin "
        f"{recommendation.operating_margin_db:.2f} dB)",
        title="Recommendation",
        border_style="green",
    ))


def render_experiment_summary(report: ExperimentReport, console: Console) -> None:
    reference = report.summary.reference_probe
    table = Table(
        title="Channel Probing Experiment",
        title_style="bold cyan",
        show_header=True,
        header_style="bold white on blue",
        border_style="blue",
        padding=(0, 1),
    )
    table.add_column("Path", style="cyan bold", no_wrap=True)
    table.add_column("km", justify="right")
    table.add_column("True GSNR", justify="right", style="magenta")
    table.add_column(f"{reference} err", justify="right", style="green")
    table.add_column(f"within ±{ACCURACY_BOUND_DB}", justify="right", style="green bold")
    table.add_column("FP", justify="right", style="red")
    table.add_column("Choice", style="white")
    fine_tuning = report.scenario.fine_tuning
    if fine_tuning:
        table.add_column("Fine-tuned", style="yellow")

    for path_report in report.paths:
        label = f"{path_report.label}*" if path_report.synthetic else path_report.label
        if path_report.failed:
            row = [label, f"{path_report.length_km:.0f}", "-", "-", "-", "-",
                   f"[red]failed: {path_report.error}[/red]"]
            if fine_tuning:
                row.append("-")
            table.add_row(*row)
            continue
        errors = path_report.errors_db(reference)
        row = [
            label,
            f"{path_report.length_km:.0f}",
            f"{path_report.true_gsnr_db[reference]:.2f}",
            f"{errors.mean():+.2f} ± {errors.std():.2f}",
            f"{report.summary.within_bound_fraction[path_report.label]:.1%}",
            str(path_report.count(Classification.FALSE_POSITIVE)),
            most_chosen(path_report) or "-",
        ]
        if fine_tuning:
            tuned = most_fine_tuned(path_report) or "-"
            row.append(f"{tuned} ({path_report.step_downs()} stepped down)")
        table.add_row(*row)
    console.print(table)
    if any(p.synthetic for p in report.paths):
        console.print("[dim]* synthetic loopback path[/dim]")
    console.print(
        f"Max |error| ({reference}): {format_db(report.summary.max_abs_error_db)} dB   "
        f"false positives: {report.summary.false_positives}   "
        f"false negatives: {report.summary.false_negatives}"
    )


def write_experiment_report(
    report: ExperimentReport,
    out_dir: Path,
    console: Console,
    figure2: bool = False,
    timestamp: Optional[str] = None,
) -> int:
    """
    Write every report file and print the summary.

    Args:
        report: Experiment report
        out_dir: Output directory (created if missing)
        console: Rich console
        figure2: Also write the margin-vs-length rows
        timestamp: Generation time to embed in report.json

    Returns:
        Exit code (0 = every file written, 1 = no path could be probed)
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "report.json", "w", encoding="utf-8") as f:
        f.write(dump_json(experiment_to_json(report, timestamp)))
        f.write("\n")

    results = [r for p in report.paths for r in p.probe_results]
    write_probe_results_csv(results, out_dir / "probe_results.csv")
    write_margins_csv(
        [(p.label, p.entries()) for p in report.paths if not p.failed],
        out_dir / "margins.csv",
    )
    write_deviations_csv(report.deviations, out_dir / "deviations.csv")
    for name, item in report.characterizations.items():
        write_samples(item.samples, out_dir / f"b2b_{name}.csv")
        with open(out_dir / f"fit_{name}.json", "w", encoding="utf-8") as f:
            f.write(dump_json(fit_to_json(item.fit, item.probe)))
            f.write("\n")
    if figure2:
        write_figure2_csv(report, out_dir / "figure2.csv")

    render_experiment_summary(report, console)
    console.print(f"[dim]Report written to:[/dim] {out_dir}")

    failed = report.summary.failed_paths
    if failed:
        console.print(
            f"[yellow]Warning:[/yellow] {len(failed)} path(s) failed: {', '.join(failed)}"
        )
    if report.paths and len(failed) == len(report.paths):
        console.print("[red]Error:[/red] every path failed")
        return 1
    return 0
