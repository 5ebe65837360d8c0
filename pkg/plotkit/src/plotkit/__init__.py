"""Figure rendering for simulator trace CSVs."""

__version__ = "0.1.0"

from .render import (PLOT_KINDS, FigureSpec, final_slopes, load_series,
                     render, series_labels)
