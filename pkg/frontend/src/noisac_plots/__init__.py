"""Figure rendering for noisac CSV results."""

from .render import FIGURE_IDS, EmptyInputError, FigureSpec, SchemaError, build_figure, render

__all__ = ["FIGURE_IDS", "EmptyInputError", "FigureSpec", "SchemaError",
           "build_figure", "render"]
__version__ = "0.1.0"
