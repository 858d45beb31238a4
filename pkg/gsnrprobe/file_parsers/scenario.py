"""Parse experiment scenario documents.

A scenario document is a topology document (optional as a whole; the default
paths are used when ``lightpaths`` is absent) plus campaign fields::

    {
      "probes": [<config>], "catalog": [<spec>],
      "settings": {<ProbeSettings fields>},
      "seeds": [0, 1, 2] | {"start": 0, "count": 200},
      "master_seed": 0, "reference_probe": "PL2",
      "operating_margin_db": 0.0, "threshold": "typical" | "worst-case",
      "fine_tuning": false
    }
"""

import dataclasses
from pathlib import Path
from typing import Any

from gsnrprobe.config import ProbeSettings
from gsnrprobe.exceptions import ConfigurationError, SchemaError
from gsnrprobe.experiment import Scenario, ScenarioPath, build_default_scenario
from gsnrprobe.file_parsers._schema import (
    boolean,
    check_fields,
    integer,
    load_json,
    number,
    optional_number,
    require_list,
    require_mapping,
    string,
)
from gsnrprobe.file_parsers.catalog import parse_catalog_data, parse_config_data
from gsnrprobe.file_parsers.topology import TOPOLOGY_FIELDS, parse_launch_data, parse_topology_data
from gsnrprobe.recommender import ThresholdKind

SCENARIO_FIELDS = (
    "probes",
    "catalog",
    "settings",
    "seeds",
    "master_seed",
    "reference_probe",
    "operating_margin_db",
    "threshold",
    "fine_tuning",
)


def parse_settings_data(data: Any, location: str,
                        base: ProbeSettings = ProbeSettings()) -> ProbeSettings:
    data = require_mapping(data, location)
    names = [f.name for f in dataclasses.fields(ProbeSettings)]
    check_fields(data, (), names, location)
    changes: dict[str, Any] = {}
    for name in data:
        if name == "clamp_extrapolation":
            changes[name] = boolean(data, name, location)
        elif name == "txrx_backout_snr_db":
            changes[name] = optional_number(data, name, location)
        else:
            changes[name] = number(data, name, location)
    try:
        return dataclasses.replace(base, **changes)
    except ValueError as exc:
        raise SchemaError(str(exc), location) from exc


def parse_seeds_data(data: Any, location: str) -> tuple[int, ...]:
    if isinstance(data, dict):
        check_fields(data, ("count",), ("start",), location)
        start, count = integer(data, "start", location, 0), integer(data, "count", location)
        if start < 0 or count < 1:
            raise SchemaError("seed range must have start >= 0 and count >= 1", location)
        return tuple(range(start, start + count))
    items = require_list(data, location)
    seeds = tuple(integer({"seed": s}, "seed", f"{location}[{i}]") for i, s in enumerate(items))
    if any(seed < 0 for seed in seeds):
        raise SchemaError("seeds must be non-negative", location)
    return seeds


def parse_scenario_data(data: Any, location: str = "scenario") -> Scenario:
    """
    Build a Scenario from decoded JSON, starting from the default scenario.

    Args:
        data: Decoded document
        location: Name used in error messages

    Returns:
        Scenario with every field the document sets overridden

    Raises:
        SchemaError: On missing, unknown or invalid fields
    """
    data = require_mapping(data, location)
    has_topology = any(key in data for key in TOPOLOGY_FIELDS)
    allowed = SCENARIO_FIELDS + ("launch",) + (TOPOLOGY_FIELDS if has_topology else ())
    check_fields(data, (), allowed, location)

    settings = ProbeSettings()
    if "settings" in data:
        settings = parse_settings_data(data["settings"], f"{location}.settings")
    default = build_default_scenario(settings=settings)
    changes: dict[str, Any] = {}

    if has_topology:
        topology = parse_topology_data(
            {k: data[k] for k in TOPOLOGY_FIELDS + ("launch",) if k in data},
            location,
        )
        changes["paths"] = tuple(
            ScenarioPath(path_id, path, topology.slot_of(path_id), topology.synthetic[path_id])
            for path_id, path in topology.lightpaths.items()
        )
        if topology.launch is not None:
            changes["launch"] = topology.launch
    elif data.get("launch") is not None:
        changes["launch"] = parse_launch_data(data["launch"], f"{location}.launch")

    if "probes" in data:
        items = require_list(data["probes"], f"{location}.probes")
        changes["probes"] = tuple(
            parse_config_data(item, f"{location}.probes[{i}]") for i, item in enumerate(items)
        )
    if "catalog" in data:
        changes["verification_catalog"] = tuple(
            parse_catalog_data(data["catalog"], f"{location}.catalog")
        )
    if "seeds" in data:
        changes["seeds"] = parse_seeds_data(data["seeds"], f"{location}.seeds")
    if "master_seed" in data:
        changes["master_seed"] = integer(data, "master_seed", location)
    if "reference_probe" in data:
        changes["reference_probe"] = string(data, "reference_probe", location)
    if "operating_margin_db" in data:
        changes["operating_margin_db"] = number(data, "operating_margin_db", location)
    if "fine_tuning" in data:
        changes["fine_tuning"] = boolean(data, "fine_tuning", location)
    if "threshold" in data:
        try:
            changes["threshold"] = ThresholdKind(string(data, "threshold", location))
        except ValueError:
            raise SchemaError(
                f"'threshold' must be one of {[t.value for t in ThresholdKind]}", location
            ) from None

    try:
        return dataclasses.replace(default, **changes)
    except ConfigurationError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(str(exc), location) from exc


def parse_scenario(file_path: Path) -> Scenario:
    return parse_scenario_data(load_json(file_path), str(file_path))
