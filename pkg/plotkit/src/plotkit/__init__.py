"""Figure rendering for shadowlab sweep CSVs."""

from .plots import KINDS, PlotSpec, render

__all__ = ["KINDS", "PlotSpec", "render"]
