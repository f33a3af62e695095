"""Figure rendering for fadecap CSV artifacts."""

from .renderer import FigureJob, SchemaError, load_csv, render

__version__ = "0.1.0"

__all__ = ["FigureJob", "SchemaError", "load_csv", "render", "__version__"]
