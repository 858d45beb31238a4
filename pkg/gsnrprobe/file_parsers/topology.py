"""Parse topology documents: spans, slots, lightpaths and an optional launch.

Schema::

    {
      "spans": {"<span id>": {<FiberSpan fields>}},
      "slots": {"<slot id>": {"center_freq_thz": 193.9, "width_ghz": 100}},
      "lightpaths": [
        {"id": "...", "spans": ["<span id>", {"span": "<span id>", "count": 12}],
         "add_drop_loss_db": 7.0, "loopback_count": 0, "slot": "<slot id>",
         "synthetic": false}
      ],
      "launch": {"psd_w_per_hz": 1.2e-14, "signal_bandwidth_ghz": 69}
                | {"power_dbm": -1.0, "bandwidth_ghz": 69}
    }
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from gsnrprobe.exceptions import ConfigurationError, DomainError, SchemaError
from gsnrprobe.file_parsers._schema import (
    boolean,
    check_fields,
    integer,
    load_json,
    number,
    require_list,
    require_mapping,
    string,
)
from gsnrprobe.link_model import FiberSpan, LaunchSpec, Lightpath, SpectrumSlot

logger = logging.getLogger(__name__)

SPAN_FIELDS = (
    "length_km",
    "attenuation_db_per_km",
    "gamma_per_w_km",
    "beta2_ps2_per_km",
    "amp_gain_db",
    "amp_noise_figure_db",
)
SPAN_OPTIONAL = ("extra_nli_psd_w_per_hz", "allow_low_noise_figure")
SLOT_FIELDS = ("center_freq_thz",)
SLOT_OPTIONAL = ("width_ghz",)
LIGHTPATH_FIELDS = ("id", "spans", "slot")
LIGHTPATH_OPTIONAL = ("add_drop_loss_db", "loopback_count", "synthetic")
TOPOLOGY_FIELDS = ("spans", "slots", "lightpaths")


@dataclass(frozen=True)
class Topology:
    spans: dict[str, FiberSpan]
    slots: dict[str, SpectrumSlot]
    lightpaths: dict[str, Lightpath]
    path_slots: dict[str, str]
    synthetic: dict[str, bool] = field(default_factory=dict)
    launch: Optional[LaunchSpec] = None

    def lightpath(self, path_id: str) -> Lightpath:
        try:
            return self.lightpaths[path_id]
        except KeyError:
            known = ", ".join(self.lightpaths)
            raise ConfigurationError(f"unknown lightpath '{path_id}' (known: {known})") from None

    def slot_of(self, path_id: str) -> SpectrumSlot:
        return self.slots[self.path_slots[self.lightpath(path_id).id]]

    def slot(self, slot_id: str) -> SpectrumSlot:
        try:
            return self.slots[slot_id]
        except KeyError:
            known = ", ".join(self.slots)
            raise ConfigurationError(f"unknown slot '{slot_id}' (known: {known})") from None


def _parse_span(data: Any, location: str) -> FiberSpan:
    data = require_mapping(data, location)
    check_fields(data, SPAN_FIELDS, SPAN_OPTIONAL, location)
    try:
        return FiberSpan(
            **{name: number(data, name, location) for name in SPAN_FIELDS},
            extra_nli_psd_w_per_hz=number(data, "extra_nli_psd_w_per_hz", location, 0.0),
            allow_low_noise_figure=boolean(data, "allow_low_noise_figure", location),
        )
    except DomainError as exc:
        raise SchemaError(str(exc), location) from exc


def parse_slot_data(data: Any, location: str) -> SpectrumSlot:
    data = require_mapping(data, location)
    check_fields(data, SLOT_FIELDS, SLOT_OPTIONAL, location)
    try:
        return SpectrumSlot(
            number(data, "center_freq_thz", location),
            number(data, "width_ghz", location, 100.0),
        )
    except DomainError as exc:
        raise SchemaError(str(exc), location) from exc


def parse_launch_data(data: Any, location: str) -> LaunchSpec:
    data = require_mapping(data, location)
    try:
        if "power_dbm" in data:
            check_fields(data, ("power_dbm", "bandwidth_ghz"), (), location)
            return LaunchSpec.from_power_dbm(
                number(data, "power_dbm", location), number(data, "bandwidth_ghz", location)
            )
        check_fields(data, ("psd_w_per_hz", "signal_bandwidth_ghz"), (), location)
        return LaunchSpec(
            number(data, "psd_w_per_hz", location),
            number(data, "signal_bandwidth_ghz", location),
        )
    except DomainError as exc:
        raise SchemaError(str(exc), location) from exc


def _expand_span_refs(refs: list[Any], spans: dict[str, FiberSpan],
                      location: str) -> list[FiberSpan]:
    chain: list[FiberSpan] = []
    for i, ref in enumerate(refs):
        where = f"{location}[{i}]"
        if isinstance(ref, str):
            span_id, count = ref, 1
        else:
            ref = require_mapping(ref, where)
            check_fields(ref, ("span",), ("count",), where)
            span_id, count = string(ref, "span", where), integer(ref, "count", where, 1)
            if count < 1:
                raise SchemaError("'count' must be >= 1", where)
        if span_id not in spans:
            raise SchemaError(f"unknown span '{span_id}'", where)
        chain.extend([spans[span_id]] * count)
    return chain


def parse_topology_data(data: Any, location: str = "topology",
                        extra_fields: tuple[str, ...] = ()) -> Topology:
    """
    Build a Topology from already-decoded JSON.

    Args:
        data: Decoded document
        location: Name used in error messages
        extra_fields: Top-level fields a wrapping document may add

    Returns:
        Parsed Topology

    Raises:
        SchemaError: On missing, unknown or invalid fields
    """
    data = require_mapping(data, location)
    check_fields(data, TOPOLOGY_FIELDS, ("launch",) + extra_fields, location)

    span_data = require_mapping(data["spans"], f"{location}.spans")
    spans = {k: _parse_span(v, f"{location}.spans.{k}") for k, v in span_data.items()}
    slot_data = require_mapping(data["slots"], f"{location}.slots")
    slots = {k: parse_slot_data(v, f"{location}.slots.{k}") for k, v in slot_data.items()}

    lightpaths: dict[str, Lightpath] = {}
    path_slots: dict[str, str] = {}
    synthetic: dict[str, bool] = {}
    for i, item in enumerate(require_list(data["lightpaths"], f"{location}.lightpaths")):
        where = f"{location}.lightpaths[{i}]"
        item = require_mapping(item, where)
        check_fields(item, LIGHTPATH_FIELDS, LIGHTPATH_OPTIONAL, where)
        path_id = string(item, "id", where)
        if path_id in lightpaths:
            raise SchemaError(f"duplicate lightpath id '{path_id}'", where)
        slot_id = string(item, "slot", where)
        if slot_id not in slots:
            raise SchemaError(f"unknown slot '{slot_id}'", where)
        chain = _expand_span_refs(require_list(item["spans"], f"{where}.spans"), spans,
                                  f"{where}.spans")
        try:
            lightpaths[path_id] = Lightpath(
                path_id,
                tuple(chain),
                number(item, "add_drop_loss_db", where, 0.0),
                integer(item, "loopback_count", where, 0),
            )
        except (DomainError, ConfigurationError) as exc:
            raise SchemaError(str(exc), where) from exc
        path_slots[path_id] = slot_id
        synthetic[path_id] = boolean(item, "synthetic", where)

    launch = None
    if data.get("launch") is not None:
        launch = parse_launch_data(data["launch"], f"{location}.launch")
    logger.debug("parsed %d spans, %d slots, %d lightpaths", len(spans), len(slots),
                 len(lightpaths))
    return Topology(spans, slots, lightpaths, path_slots, synthetic, launch)


def parse_topology(file_path: Path) -> Topology:
    return parse_topology_data(load_json(file_path), str(file_path))
