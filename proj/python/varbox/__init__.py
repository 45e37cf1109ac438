"""Box enclosures of real algebraic varieties."""

from ._core import (
    DimensionError,
    Error,
    ParseError,
    Polynomial,
    bound,
    coverage,
    detect_empty,
    enclose,
    parse,
    path,
    roadmap,
    run,
    sample,
    sdp_solve_count,
    skeleton,
)

__all__ = [
    "DimensionError",
    "Error",
    "ParseError",
    "Polynomial",
    "bound",
    "coverage",
    "detect_empty",
    "enclose",
    "parse",
    "path",
    "roadmap",
    "run",
    "sample",
    "sdp_solve_count",
    "skeleton",
]
