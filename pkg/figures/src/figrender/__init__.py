"""Chart renderer for ecomech experiment tables."""

from .render import KINDS, FigureSpec, render
from .tables import Table, TableError, read_table, read_tables

__version__ = "0.1.0"

__all__ = ["KINDS", "FigureSpec", "Table", "TableError", "read_table",
           "read_tables", "render"]
