"""File formats, report rendering and sweeps behind the CLI."""

from src.services.instance_io import InstanceFile, InstanceParseError, parse_instance, serialize_instance
from src.services.reporting import dump_report, to_jsonable
from src.services.sweep import SweepReport, run_sweep

__all__ = [
    "InstanceFile",
    "InstanceParseError",
    "SweepReport",
    "dump_report",
    "parse_instance",
    "run_sweep",
    "serialize_instance",
    "to_jsonable",
]
