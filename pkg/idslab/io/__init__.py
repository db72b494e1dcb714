"""Config file reader and result writers."""

from .spec_file import SpecFile, build_spec, load_spec, parse_law, evaluate_profile
from .export import (
    result_name,
    write_curve,
    write_report,
    write_field_csv,
    write_field_binary,
    read_field_binary,
    write_matrix_coo,
)

__all__ = [
    "SpecFile",
    "build_spec",
    "load_spec",
    "parse_law",
    "evaluate_profile",
    "result_name",
    "write_curve",
    "write_report",
    "write_field_csv",
    "write_field_binary",
    "read_field_binary",
    "write_matrix_coo",
]
