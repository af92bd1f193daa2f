"""Static figure rendering for the circular-array CSV outputs."""

__version__ = "0.1.0"

from .render import (
    FIGURE_KINDS,
    EmptyInputError,
    FigureError,
    FigureJob,
    SchemaMismatchError,
    render,
)

__all__ = [
    "FIGURE_KINDS",
    "EmptyInputError",
    "FigureError",
    "FigureJob",
    "SchemaMismatchError",
    "render",
]
