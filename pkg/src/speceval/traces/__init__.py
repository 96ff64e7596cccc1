"""Agent-trace parsing and editing-style/trajectory analytics."""

from .diffscore import DiffScoreResult, compute_diff_score, correlate, edit_ratio
from .parse import load_any_trace, parse_trace
from .raster import RasterRow, RasterTick, build_raster, render_raster_svg
from .trajectory import CATEGORY_ORDER, TrajectorySummary, compute_trajectory

__all__ = [
    "CATEGORY_ORDER",
    "DiffScoreResult",
    "RasterRow",
    "RasterTick",
    "TrajectorySummary",
    "build_raster",
    "compute_diff_score",
    "compute_trajectory",
    "correlate",
    "edit_ratio",
    "load_any_trace",
    "parse_trace",
    "render_raster_svg",
]
