"""Figure rendering for beamsim benchmark CSVs."""

from .render import RenderError, TraceSeries, build_figure, load_series, render
from .spec import FigureSpec, FigureSpecError, LineStyle, load_figure_spec

__version__ = "0.1.0"
