"""Accelerated primal-dual solver for quasi-static frictional contact."""

from ._core import (
    DimensionError,
    IoError,
    Problem,
    export_soclcp,
    gen,
    oracle,
    project_friction_cone,
    project_soc,
    read_problem,
    residuals,
    solve,
    verify_soclcp,
    write_problem,
)

__all__ = [
    "DimensionError",
    "IoError",
    "Problem",
    "export_soclcp",
    "gen",
    "oracle",
    "project_friction_cone",
    "project_soc",
    "read_problem",
    "residuals",
    "solve",
    "verify_soclcp",
    "write_problem",
]
__version__ = "0.1.0"
