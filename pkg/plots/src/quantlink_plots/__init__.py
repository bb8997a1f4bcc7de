"""Figure rendering for quantlink experiment CSVs."""

from .render import PlotSpec, SchemaError, load_records, render

__version__ = "0.1.0"
