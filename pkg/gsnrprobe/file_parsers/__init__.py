"""Parse gsnrprobe input documents."""

from gsnrprobe.file_parsers.catalog import parse_catalog
from gsnrprobe.file_parsers.results import parse_fit, parse_probe_result
from gsnrprobe.file_parsers.samples import parse_samples, write_samples
from gsnrprobe.file_parsers.scenario import parse_scenario
from gsnrprobe.file_parsers.topology import Topology, parse_topology

__all__ = [
    "Topology",
    "parse_catalog",
    "parse_fit",
    "parse_probe_result",
    "parse_samples",
    "parse_scenario",
    "parse_topology",
    "write_samples",
]
