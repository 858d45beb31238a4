"""Parse transponder catalog documents (a JSON list of format specs)."""

from pathlib import Path
from typing import Any

from gsnrprobe.config import WORST_CASE_OFFSET_DB
from gsnrprobe.exceptions import DomainError, SchemaError
from gsnrprobe.file_parsers._schema import (
    check_fields,
    load_json,
    number,
    require_list,
    require_mapping,
    string,
)
from gsnrprobe.transponder import ModFormatSpec, TransponderConfig, validate_catalog

CONFIG_FIELDS = ("name", "bits_per_symbol", "symbol_rate_gbd", "line_rate_gbps")
SPEC_FIELDS = CONFIG_FIELDS + ("required_gsnr_typical_db",)


def parse_config_data(data: Any, location: str) -> TransponderConfig:
    data = require_mapping(data, location)
    check_fields(data, CONFIG_FIELDS, (), location)
    try:
        return TransponderConfig(
            name=string(data, "name", location),
            bits_per_symbol=number(data, "bits_per_symbol", location),
            symbol_rate_gbd=number(data, "symbol_rate_gbd", location),
            line_rate_gbps=number(data, "line_rate_gbps", location),
        )
    except DomainError as exc:
        raise SchemaError(str(exc), location) from exc


def parse_spec_data(data: Any, location: str) -> ModFormatSpec:
    data = require_mapping(data, location)
    check_fields(data, SPEC_FIELDS, ("required_gsnr_worst_db",), location)
    config = parse_config_data({k: data[k] for k in CONFIG_FIELDS}, location)
    typical = number(data, "required_gsnr_typical_db", location)
    worst = number(data, "required_gsnr_worst_db", location, typical + WORST_CASE_OFFSET_DB)
    try:
        return ModFormatSpec(config, typical, worst)
    except DomainError as exc:
        raise SchemaError(str(exc), location) from exc


def parse_catalog_data(data: Any, location: str = "catalog") -> list[ModFormatSpec]:
    """Build and validate a catalog from already-decoded JSON."""
    items = require_list(data, location)
    catalog = [parse_spec_data(item, f"{location}[{i}]") for i, item in enumerate(items)]
    validate_catalog(catalog)
    return catalog


def parse_catalog(file_path: Path) -> list[ModFormatSpec]:
    return parse_catalog_data(load_json(file_path), str(file_path))
