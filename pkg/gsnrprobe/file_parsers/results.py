"""Parse fit and probe-result documents written by gsnrprobe."""

from pathlib import Path
from typing import Any, Optional

from gsnrprobe.b2b_fit import QuadraticFit
from gsnrprobe.exceptions import DomainError, FitError, SchemaError
from gsnrprobe.file_parsers._schema import (
    check_fields,
    integer,
    load_json,
    number,
    optional_number,
    require_list,
    require_mapping,
)
from gsnrprobe.file_parsers.catalog import parse_config_data
from gsnrprobe.file_parsers.topology import parse_slot_data
from gsnrprobe.probe import ProbeResult
from gsnrprobe.transponder import TransponderConfig

FIT_FIELDS = ("a", "b", "c", "osnr_min_db", "osnr_max_db")
FIT_OPTIONAL = ("residual_rms_db", "max_abs_residual_db", "standard_errors", "probe")
PROBE_RESULT_FIELDS = (
    "probe",
    "slot",
    "measured_q_db",
    "estimated_gosnr_db",
    "estimated_gsnr_db",
    "seed",
)
PROBE_RESULT_OPTIONAL = ("path_id", "true_gsnr_db")


def parse_fit_data(data: Any,
                   location: str = "fit") -> tuple[QuadraticFit, Optional[TransponderConfig]]:
    """Fit coefficients and, when recorded, the probe they characterize."""
    data = require_mapping(data, location)
    check_fields(data, FIT_FIELDS, FIT_OPTIONAL, location)
    if data.get("standard_errors") is not None:
        require_list(data["standard_errors"], f"{location}.standard_errors")
    probe = None
    if data.get("probe") is not None:
        probe = parse_config_data(data["probe"], f"{location}.probe")
    try:
        fit = QuadraticFit(
            *(number(data, name, location) for name in FIT_FIELDS),
            residual_rms_db=number(data, "residual_rms_db", location, 0.0),
            max_abs_residual_db=number(data, "max_abs_residual_db", location, 0.0),
        )
    except FitError as exc:
        raise SchemaError(str(exc), location) from exc
    return fit, probe


def parse_fit(file_path: Path) -> tuple[QuadraticFit, Optional[TransponderConfig]]:
    return parse_fit_data(load_json(file_path), str(file_path))


def parse_probe_result_data(data: Any, location: str = "probe result") -> ProbeResult:
    data = require_mapping(data, location)
    check_fields(data, PROBE_RESULT_FIELDS, PROBE_RESULT_OPTIONAL, location)
    path_id = data.get("path_id")
    if path_id is not None and not isinstance(path_id, str):
        raise SchemaError("'path_id' must be a string", location)
    try:
        return ProbeResult(
            probe=parse_config_data(data["probe"], f"{location}.probe"),
            slot=parse_slot_data(data["slot"], f"{location}.slot"),
            measured_q_db=number(data, "measured_q_db", location),
            estimated_gosnr_db=number(data, "estimated_gosnr_db", location),
            estimated_gsnr_db=number(data, "estimated_gsnr_db", location),
            seed=integer(data, "seed", location),
            path_id=path_id,
            true_gsnr_db=optional_number(data, "true_gsnr_db", location),
        )
    except DomainError as exc:
        raise SchemaError(str(exc), location) from exc


def parse_probe_result(file_path: Path) -> ProbeResult:
    return parse_probe_result_data(load_json(file_path), str(file_path))
