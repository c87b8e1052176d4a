"""Figure rendering for simulator result CSVs."""

from .figures import FIGURE_KINDS, FigureSpec, build_figure, render
from .schemas import SCHEMAS, RenderError

__all__ = [
    "FIGURE_KINDS",
    "FigureSpec",
    "RenderError",
    "SCHEMAS",
    "build_figure",
    "render",
]
