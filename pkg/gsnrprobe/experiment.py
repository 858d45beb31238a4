"""Desk-scale replay of a multi-path probing campaign."""

import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from gsnrprobe.b2b_fit import QuadraticFit, fit_b2b
from gsnrprobe.config import (
    DEFAULT_ADD_DROP_LOSS_DB,
    DEFAULT_LAUNCH_POWER_DBM,
    DEFAULT_LAUNCH_REFERENCE_GHZ,
    DEFAULT_SPAN_LENGTH_KM,
    ProbeSettings,
)
from gsnrprobe.exceptions import ChannelProbeError, ConfigurationError
from gsnrprobe.link_model import FiberSpan, LaunchSpec, Lightpath, SpectrumSlot, true_gosnr_db
from gsnrprobe.probe import ProbeResult, run_probe
from gsnrprobe.recommender import (
    Classification,
    MarginEntry,
    Recommendation,
    ThresholdKind,
    compute_margins,
    fine_tune,
    recommend,
    verify,
)
from gsnrprobe.transponder import (
    ModFormatSpec,
    QOverOsnrSample,
    TransponderConfig,
    config_name,
    default_catalog,
    default_probes,
    find_probe,
    synthesize_b2b,
    validate_catalog,
)

logger = logging.getLogger(__name__)

ACCURACY_BOUND_DB = 0.7
REFERENCE_PROBE = "PL2"
DEFAULT_COMPARISON_PATHS = ("1016km", "1792km")

# label, base length (km), loopbacks, slot center (THz), synthetic
DEFAULT_PATHS: tuple[tuple[str, float, int, float, bool], ...] = (
    ("1016km", 1016.0, 0, 193.90, False),
    ("1792km", 1792.0, 0, 194.00, False),
    ("2943km", 2943.0, 0, 194.10, False),
    ("3735km", 1245.0, 2, 194.20, True),
    ("4851km", 1617.0, 2, 194.20, True),
    ("5738km", 2869.0, 1, 194.20, False),
)

# Synthetic plants carry no measured add/drop loss. It is solved for so that the
# named configuration sits at the given true margin (dB) from its threshold.
CALIBRATED_PATHS: dict[str, tuple[str, float]] = {
    "3735km": (config_name(300.0, 3.0, 69.0), -0.1),
}
MAX_ADD_DROP_LOSS_DB = 30.0


@dataclass(frozen=True)
class ScenarioPath:
    label: str
    path: Lightpath
    slot: SpectrumSlot
    synthetic: bool = False

    @property
    def length_km(self) -> float:
        return self.path.total_length_km


@dataclass(frozen=True)
class Scenario:
    """Paths, probes, catalog and probing settings of one campaign."""

    paths: tuple[ScenarioPath, ...]
    probes: tuple[TransponderConfig, ...]
    verification_catalog: tuple[ModFormatSpec, ...]
    launch: LaunchSpec
    settings: ProbeSettings = field(default_factory=ProbeSettings)
    seeds: tuple[int, ...] = tuple(range(200))
    master_seed: int = 0
    reference_probe: str = REFERENCE_PROBE
    operating_margin_db: float = 0.0
    threshold: ThresholdKind = ThresholdKind.TYPICAL
    fine_tuning: bool = False

    def __post_init__(self) -> None:
        for name in ("paths", "probes", "verification_catalog", "seeds"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.paths:
            raise ConfigurationError("scenario has no paths")
        labels = [p.label for p in self.paths]
        if len(set(labels)) != len(labels):
            raise ConfigurationError("scenario path labels must be unique")
        if not self.seeds:
            raise ConfigurationError("scenario has no seeds")
        if any(seed < 0 for seed in self.seeds) or self.master_seed < 0:
            raise ConfigurationError("seeds must be non-negative integers")
        if self.operating_margin_db < 0:
            raise ConfigurationError("operating margin must be >= 0 dB")
        find_probe(self.probes, self.reference_probe)
        validate_catalog(self.verification_catalog)

    @property
    def q_noise_sigma_db(self) -> float:
        return self.settings.q_noise_sigma_db

    def path(self, label: str) -> ScenarioPath:
        for scenario_path in self.paths:
            if scenario_path.label == label:
                return scenario_path
        known = ", ".join(p.label for p in self.paths)
        raise ConfigurationError(f"unknown path '{label}' (known: {known})")


def homogeneous_lightpath(path_id: str, length_km: float, loopback_count: int = 0,
                          add_drop_loss_db: float = DEFAULT_ADD_DROP_LOSS_DB,
                          span_length_km: float = DEFAULT_SPAN_LENGTH_KM) -> Lightpath:
    """Chain of identical transparent spans, about ``span_length_km`` each."""
    count = max(1, round(length_km / span_length_km))
    span = FiberSpan.transparent(length_km / count)
    return Lightpath(path_id, (span,) * count, add_drop_loss_db, loopback_count)


def calibrate_add_drop_loss(path: Lightpath, spec: ModFormatSpec, slot: SpectrumSlot,
                            launch: LaunchSpec, target_margin_db: float,
                            threshold: ThresholdKind = ThresholdKind.TYPICAL) -> Lightpath:
    """
    Set the add/drop loss so ``spec`` sits ``target_margin_db`` from its threshold.

    Args:
        path: Lightpath whose add/drop loss is replaced
        spec: Catalog entry to place
        slot: Slot the path is probed in
        launch: Launch PSD reference
        target_margin_db: True GSNR minus threshold to reach, in dB
        threshold: Which requirement the margin refers to

    Returns:
        Copy of ``path`` with the solved add/drop loss

    Raises:
        ConfigurationError: If no loss in [0, MAX_ADD_DROP_LOSS_DB] reaches the target
    """
    signal = launch.with_bandwidth(spec.config.symbol_rate_gbd)
    required = threshold.of(spec)

    def excess(loss_db: float) -> float:
        trial = replace(path, add_drop_loss_db=loss_db)
        return true_gosnr_db(trial, signal, slot) - required - target_margin_db

    if excess(0.0) < 0 or excess(MAX_ADD_DROP_LOSS_DB) > 0:
        raise ConfigurationError(
            f"no add/drop loss puts {spec.name} at {target_margin_db:+.2f} dB on '{path.id}'"
        )
    loss_db = brentq(excess, 0.0, MAX_ADD_DROP_LOSS_DB, xtol=1e-9)
    logger.debug("calibrated add/drop loss on %s: %.3f dB", path.id, loss_db)
    return replace(path, add_drop_loss_db=float(loss_db))


def build_default_scenario(
    seeds: Iterable[int] = range(200),
    master_seed: int = 0,
    settings: Optional[ProbeSettings] = None,
    operating_margin_db: float = 0.0,
    fine_tuning: bool = False,
) -> Scenario:
    """
    Six paths from 1016 km to 5738 km, probes PL1-PL4 and the default catalog.

    3735 km and 4851 km are double loopbacks of synthetic base paths. The
    3735 km add/drop loss is calibrated (see ``CALIBRATED_PATHS``).
    """
    settings = settings or ProbeSettings()
    catalog = {spec.name: spec for spec in default_catalog(settings.plt_penalty_db)}
    launch = LaunchSpec.from_power_dbm(DEFAULT_LAUNCH_POWER_DBM, DEFAULT_LAUNCH_REFERENCE_GHZ)

    paths = []
    for label, base_km, loopbacks, center_thz, synthetic in DEFAULT_PATHS:
        slot = SpectrumSlot(center_thz)
        path = homogeneous_lightpath(label, base_km, loopbacks)
        if label in CALIBRATED_PATHS:
            spec_name, target_margin_db = CALIBRATED_PATHS[label]
            path = calibrate_add_drop_loss(path, catalog[spec_name], slot, launch,
                                           target_margin_db)
        paths.append(ScenarioPath(label, path, slot, synthetic))

    return Scenario(
        paths=tuple(paths),
        probes=tuple(default_probes()),
        verification_catalog=tuple(catalog.values()),
        launch=launch,
        settings=settings,
        seeds=tuple(seeds),
        master_seed=master_seed,
        operating_margin_db=operating_margin_db,
        fine_tuning=fine_tuning,
    )


def run_seed(master_seed: int, replicate: int, path_index: int, probe_index: int) -> int:
    """Independent stream per (replicate, path, probe), derived from the master seed."""
    sequence = np.random.SeedSequence([master_seed, replicate, path_index, probe_index])
    return int(sequence.generate_state(1)[0])


@dataclass(frozen=True)
class ProbeCharacterization:
    probe: TransponderConfig
    samples: tuple[QOverOsnrSample, ...]
    fit: QuadraticFit


def characterize_probes(scenario: Scenario) -> dict[str, ProbeCharacterization]:
    """Noiseless B2B sweep and fit of every probe with the characterized module."""
    settings = scenario.settings
    characterized = {}
    for probe in scenario.probes:
        samples = synthesize_b2b(
            probe,
            settings.plt_penalty_db,
            settings.b2b_osnr_min_db,
            settings.b2b_osnr_max_db,
            settings.b2b_step_db,
        )
        characterized[probe.name] = ProbeCharacterization(probe, tuple(samples), fit_b2b(samples))
    return characterized


@dataclass(frozen=True)
class PathReport:
    """Everything measured on one path; ``error`` is set when the path failed."""

    label: str
    length_km: float
    synthetic: bool
    slot: SpectrumSlot
    reference_probe: str
    true_gsnr_db: dict[str, float] = field(default_factory=dict)
    probe_results: tuple[ProbeResult, ...] = ()
    margins: tuple[tuple[MarginEntry, ...], ...] = ()
    fine_tuned: tuple[Optional[str], ...] = ()
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    def results_for(self, probe_name: str) -> list[ProbeResult]:
        return [r for r in self.probe_results if r.probe.name == probe_name]

    def estimates_db(self, probe_name: str) -> np.ndarray:
        return np.array([r.estimated_gsnr_db for r in self.results_for(probe_name)])

    def errors_db(self, probe_name: str) -> np.ndarray:
        return np.array([r.error_db for r in self.results_for(probe_name)], dtype=float)

    def entries(self) -> list[MarginEntry]:
        return [entry for per_seed in self.margins for entry in per_seed]

    def mean_margin_db(self, spec_name: str) -> float:
        values = [e.margin_db for e in self.entries() if e.spec.name == spec_name]
        if not values:
            raise ConfigurationError(f"no margins for '{spec_name}' on {self.label}")
        return float(np.mean(values))

    def actual_feasible(self, spec_name: str) -> Optional[bool]:
        for entry in self.entries():
            if entry.spec.name == spec_name:
                return entry.actual_feasible
        return None

    def recommendations(self) -> list[Recommendation]:
        return [
            recommend(per_seed, per_seed[0].operating_margin_db)
            for per_seed in self.margins if per_seed
        ]

    def count(self, classification: Classification) -> int:
        return sum(1 for e in self.entries() if e.classification is classification)

    def step_downs(self) -> int:
        """Replicates where fine-tuning settled below the recommended configuration."""
        chosen = [r.chosen.name if r.chosen else None for r in self.recommendations()]
        return sum(1 for before, after in zip(chosen, self.fine_tuned) if before != after)


@dataclass(frozen=True)
class ExperimentSummary:
    reference_probe: str
    probe_runs: int
    max_abs_error_db: float
    within_bound_fraction: dict[str, float]
    false_positives: int
    false_negatives: int
    failed_paths: tuple[str, ...]
    accuracy_bound_db: float = ACCURACY_BOUND_DB


@dataclass(frozen=True)
class DeviationRow:
    """Per-probe deviation from the reference probe's estimate on one path."""

    path_label: str
    probe: str
    mean_db: float
    deviation_sigma_db: float
    estimate_sigma_db: float
    fit_slope: float


@dataclass(frozen=True)
class ExperimentReport:
    scenario: Scenario
    characterizations: dict[str, ProbeCharacterization]
    paths: tuple[PathReport, ...]
    summary: ExperimentSummary
    deviations: tuple[DeviationRow, ...]

    def path(self, label: str) -> PathReport:
        for path_report in self.paths:
            if path_report.label == label:
                return path_report
        raise ConfigurationError(f"unknown path '{label}'")


def _run_path(scenario: Scenario, path_index: int,
              characterized: dict[str, ProbeCharacterization]) -> PathReport:
    scenario_path = scenario.paths[path_index]
    settings = scenario.settings
    path, slot = scenario_path.path, scenario_path.slot

    results: list[ProbeResult] = []
    truth: dict[str, float] = {}
    for probe_index, probe in enumerate(scenario.probes):
        launch = scenario.launch.with_bandwidth(probe.symbol_rate_gbd)
        truth[probe.name] = true_gosnr_db(path, launch, slot)
        for replicate in scenario.seeds:
            results.append(
                run_probe(
                    path,
                    probe,
                    slot,
                    launch,
                    characterized[probe.name].fit,
                    settings.q_noise_sigma_db,
                    run_seed(scenario.master_seed, replicate, path_index, probe_index),
                    impl_penalty_db=settings.probe_penalty_db,
                    module_bias_db=settings.module_bias_db,
                    txrx_backout_snr_db=settings.txrx_backout_snr_db,
                    clamp=settings.clamp_extrapolation,
                )
            )

    actual = {
        spec.name: verify(path, spec, slot, scenario.launch, scenario.threshold)
        for spec in scenario.verification_catalog
    }
    reference = [r for r in results if r.probe.name == scenario.reference_probe]
    margins = tuple(
        tuple(
            entry.with_outcome(actual[entry.spec.name])
            for entry in compute_margins(
                result.estimated_gsnr_db,
                scenario.verification_catalog,
                scenario.operating_margin_db,
            )
        )
        for result in reference
    )
    fine_tuned: tuple[Optional[str], ...] = ()
    if scenario.fine_tuning:
        fine_tuned = tuple(
            _fine_tuned_name(per_seed, scenario.operating_margin_db, actual)
            for per_seed in margins
        )
    return PathReport(
        label=scenario_path.label,
        length_km=scenario_path.length_km,
        synthetic=scenario_path.synthetic,
        slot=slot,
        reference_probe=scenario.reference_probe,
        true_gsnr_db=truth,
        probe_results=tuple(results),
        margins=margins,
        fine_tuned=fine_tuned,
    )


def _fine_tuned_name(entries: Sequence[MarginEntry], operating_margin_db: float,
                     actual: dict[str, bool]) -> Optional[str]:
    tuned = fine_tune(recommend(entries, operating_margin_db), lambda spec: actual[spec.name])
    return tuned.spec.name if tuned is not None else None


def _safe_run_path(scenario: Scenario, path_index: int,
                   characterized: dict[str, ProbeCharacterization]) -> PathReport:
    try:
        return _run_path(scenario, path_index, characterized)
    except ChannelProbeError as exc:
        scenario_path = scenario.paths[path_index]
        logger.warning("path %s failed: %s", scenario_path.label, exc)
        return PathReport(
            label=scenario_path.label,
            length_km=scenario_path.length_km,
            synthetic=scenario_path.synthetic,
            slot=scenario_path.slot,
            reference_probe=scenario.reference_probe,
            error=str(exc),
        )


def _summarize(scenario: Scenario, paths: Sequence[PathReport]) -> ExperimentSummary:
    reference = scenario.reference_probe
    errors = [p.errors_db(reference) for p in paths if not p.failed]
    all_errors = np.concatenate(errors) if errors else np.array([])
    return ExperimentSummary(
        reference_probe=reference,
        probe_runs=sum(len(p.probe_results) for p in paths),
        max_abs_error_db=float(np.max(np.abs(all_errors))) if all_errors.size else math.nan,
        within_bound_fraction={
            p.label: float(np.mean(np.abs(p.errors_db(reference)) <= ACCURACY_BOUND_DB))
            for p in paths if not p.failed
        },
        false_positives=sum(p.count(Classification.FALSE_POSITIVE) for p in paths),
        false_negatives=sum(p.count(Classification.FALSE_NEGATIVE) for p in paths),
        failed_paths=tuple(p.label for p in paths if p.failed),
    )


def deviation_rows(report_paths: Sequence[PathReport], probes: Sequence[TransponderConfig],
                   characterized: dict[str, ProbeCharacterization],
                   reference_probe: str) -> list[DeviationRow]:
    """Estimate minus reference estimate, paired by replicate, per probe and path."""
    rows = []
    for path_report in report_paths:
        if path_report.failed:
            continue
        reference = path_report.estimates_db(reference_probe)
        for probe in probes:
            estimates = path_report.estimates_db(probe.name)
            deviation = estimates - reference
            gosnr = np.mean([r.estimated_gosnr_db for r in path_report.results_for(probe.name)])
            rows.append(
                DeviationRow(
                    path_label=path_report.label,
                    probe=probe.name,
                    mean_db=float(np.mean(deviation)),
                    deviation_sigma_db=float(np.std(deviation)),
                    estimate_sigma_db=float(np.std(estimates)),
                    fit_slope=characterized[probe.name].fit.slope(float(gosnr)),
                )
            )
    return rows


def run_experiment(scenario: Scenario, max_workers: int = 4,
                   only: Optional[Sequence[str]] = None) -> ExperimentReport:
    """
    Probe every path with every probe and seed, then verify every catalog entry.

    Paths run in parallel; the report is assembled in scenario order, so it
    does not depend on scheduling.

    Args:
        scenario: Campaign to replay
        max_workers: Maximum number of worker threads
        only: Restrict the sweep to these path labels (seed streams unchanged)

    Returns:
        ExperimentReport with per-path results, summary and deviation table
    """
    indices = list(range(len(scenario.paths)))
    if only is not None:
        indices = [scenario.paths.index(scenario.path(label)) for label in only]
    characterized = characterize_probes(scenario)

    by_index: dict[int, PathReport] = {}
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = {
            executor.submit(_safe_run_path, scenario, index, characterized): index
            for index in indices
        }
        for future in as_completed(futures):
            index = futures[future]
            by_index[index] = future.result()
            logger.info("finished path %s", scenario.paths[index].label)

    paths = tuple(by_index[index] for index in indices)
    return ExperimentReport(
        scenario=scenario,
        characterizations=characterized,
        paths=paths,
        summary=_summarize(scenario, paths),
        deviations=tuple(
            deviation_rows(paths, scenario.probes, characterized, scenario.reference_probe)
        ),
    )


def probe_setting_comparison(
    scenario: Scenario,
    path_labels: Sequence[str] = DEFAULT_COMPARISON_PATHS,
    report: Optional[ExperimentReport] = None,
) -> list[DeviationRow]:
    """
    Deviation of every probe setting from the reference probe on two paths.

    Args:
        scenario: Campaign the paths belong to
        path_labels: Paths to compare
        report: Reuse an existing report instead of probing again

    Returns:
        One DeviationRow per path and probe
    """
    for label in path_labels:
        scenario.path(label)
    if report is None:
        report = run_experiment(scenario, only=list(path_labels))
    return [row for row in report.deviations if row.path_label in path_labels]


def figure2_rows(report: ExperimentReport) -> list[tuple[float, str, float, Optional[bool]]]:
    """(path length, config name, mean margin, actual feasibility) per path and config."""
    rows = []
    for path_report in report.paths:
        if path_report.failed:
            continue
        for spec in report.scenario.verification_catalog:
            rows.append(
                (
                    path_report.length_km,
                    spec.name,
                    path_report.mean_margin_db(spec.name),
                    path_report.actual_feasible(spec.name),
                )
            )
    return rows


def most_chosen(path_report: PathReport) -> Optional[str]:
    """Configuration chosen most often over the replicates, ties by first seen."""
    chosen = [r.chosen.name for r in path_report.recommendations() if r.chosen is not None]
    if not chosen:
        return None
    return Counter(chosen).most_common(1)[0][0]


def most_fine_tuned(path_report: PathReport) -> Optional[str]:
    """Configuration fine-tuning settled on most often, ties by first seen."""
    settled = [name for name in path_report.fine_tuned if name is not None]
    if not settled:
        return None
    return Counter(settled).most_common(1)[0][0]
