"""Figure scripts for banditlab benchmark CSV output."""

from .figures import (
    FIGURE_KINDS,
    FigureSpec,
    PlotKitError,
    SchemaMismatch,
    load_rows,
    render,
)

__version__ = "0.1.0"
