"""Shared field checks for JSON input documents."""

import json
import math
from pathlib import Path
from typing import Any, Iterable, Optional

from gsnrprobe.exceptions import SchemaError


def load_json(file_path: Path) -> Any:
    """Read a JSON document, turning decode errors into SchemaError."""
    try:
        with open(file_path, encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}", str(file_path)) from exc


def require_mapping(value: Any, location: str) -> dict[str, Any]:
    if not isinstance(value, dict):
        raise SchemaError(f"expected an object, got {type(value).__name__}", location)
    return value


def require_list(value: Any, location: str) -> list[Any]:
    if not isinstance(value, list):
        raise SchemaError(f"expected a list, got {type(value).__name__}", location)
    return value


def check_fields(data: dict[str, Any], required: Iterable[str], optional: Iterable[str],
                 location: str) -> None:
    """Reject missing required fields and any field not named in the schema."""
    required = set(required)
    allowed = required | set(optional)
    missing = sorted(required - data.keys())
    if missing:
        raise SchemaError(f"missing field(s): {', '.join(missing)}", location)
    unknown = sorted(data.keys() - allowed)
    if unknown:
        raise SchemaError(f"unknown field(s): {', '.join(unknown)}", location)


def number(data: dict[str, Any], key: str, location: str,
           default: Optional[float] = None) -> float:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"'{key}' must be a number, got {value!r}", location)
    if not math.isfinite(value):
        raise SchemaError(f"'{key}' must be finite", location)
    return float(value)


def optional_number(data: dict[str, Any], key: str, location: str) -> Optional[float]:
    if data.get(key) is None:
        return None
    return number(data, key, location)


def integer(data: dict[str, Any], key: str, location: str, default: Optional[int] = None) -> int:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"'{key}' must be an integer, got {value!r}", location)
    return value


def string(data: dict[str, Any], key: str, location: str, default: Optional[str] = None) -> str:
    value = data.get(key, default)
    if not isinstance(value, str) or not value:
        raise SchemaError(f"'{key}' must be a non-empty string, got {value!r}", location)
    return value


def boolean(data: dict[str, Any], key: str, location: str, default: bool = False) -> bool:
    value = data.get(key, default)
    if not isinstance(value, bool):
        raise SchemaError(f"'{key}' must be true or false, got {value!r}", location)
    return value
