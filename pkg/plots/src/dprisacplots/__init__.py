"""Figure generation for dprisac experiment CSVs."""

from .render import FigureSpec, render
from .schemas import EXPERIMENTS, SCHEMAS, SchemaError, load_rows

__all__ = ["EXPERIMENTS", "FigureSpec", "SCHEMAS", "SchemaError", "load_rows", "render"]
