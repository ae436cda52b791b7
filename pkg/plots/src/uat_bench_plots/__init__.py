"""Figure rendering for emitted benchmark .dat files."""

from .figures import (
    ErrorTable,
    TableFormatError,
    build_error_figure,
    build_surface_figure,
    load_surface,
    load_table,
    render_error_plot,
    render_surface,
)

__all__ = [
    "ErrorTable",
    "TableFormatError",
    "build_error_figure",
    "build_surface_figure",
    "load_surface",
    "load_table",
    "render_error_plot",
    "render_surface",
]
