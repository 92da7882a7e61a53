"""Batch figure rendering for decoder-benchmark CSV exports."""

from .figures import KINDS, EmptyInputError, FigureSpec, SchemaError, extract_series, render

__version__ = "0.1.0"
