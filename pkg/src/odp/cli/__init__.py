"""Command-line front end, run configuration, persistence and the acceptance suite."""

from odp.cli.run_config import RunConfig
from odp.cli.output import build_meta, write_table, read_table, write_report, read_report
from odp.cli.rescale import rescale_to_unit_sphere, unit_sphere_parameters
from odp.cli.verify import run_verify
from odp.cli.main import run, main

__all__ = [
    "RunConfig",
    "build_meta",
    "write_table",
    "read_table",
    "write_report",
    "read_report",
    "rescale_to_unit_sphere",
    "unit_sphere_parameters",
    "run_verify",
    "run",
    "main",
]
