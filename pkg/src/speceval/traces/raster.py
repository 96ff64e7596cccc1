"""Workload-weighted per-run action raster and its SVG rendering.

Each run is one row of colored ticks positioned by normalized progress.
Write ticks widen with the number of files touched so batched mutation
logging is not undercounted against per-file logging.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..config import DEFAULT_FAMILY_ORDER
from ..model import RunTrace
from .trajectory import event_progress

TICK_COLORS = {
    "inspect": "#9e9e9e",
    "write": "#1f77b4",
    "verify": "#2ca02c",
    "failure": "#d62728",
    "other": "#ff7f0e",
}
SEARCH_COLOR = "#9467bd"

WIDTH_CAP = 64.0
WIDTH_FLOOR = 1.2
WIDTH_PER_FILE = 0.9


def write_tick_width(files_touched: int) -> float:
    return min(WIDTH_CAP, max(WIDTH_FLOOR, WIDTH_PER_FILE * files_touched))


@dataclass(frozen=True)
class RasterTick:
    position: float
    color: str
    width_px: float

    def to_dict(self) -> dict:
        return {"position": self.position, "color": self.color, "width_px": self.width_px}


@dataclass(frozen=True)
class RasterRow:
    run_id: str
    family_group: str
    residual: float
    background: str
    ticks: tuple[RasterTick, ...]
    neutral: bool = False  # run had no score; residual pinned to 0

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "family_group": self.family_group,
            "residual": self.residual,
            "background": self.background,
            "neutral": self.neutral,
            "ticks": [t.to_dict() for t in self.ticks],
        }


def score_residuals(traces: list[RunTrace]) -> dict[str, tuple[float, bool]]:
    """run_id -> (score minus task/condition group mean, neutral flag)."""
    groups: dict[tuple[str, str], list[float]] = {}
    for t in traces:
        if t.score is not None:
            groups.setdefault((t.task_label, t.condition_label), []).append(t.score)
    out: dict[str, tuple[float, bool]] = {}
    for t in traces:
        if t.score is None:
            out[t.run_id] = (0.0, True)
        else:
            peers = groups[(t.task_label, t.condition_label)]
            out[t.run_id] = (t.score - sum(peers) / len(peers), False)
    return out


def build_raster(
    traces: list[RunTrace],
    family_order: tuple[str, ...] = DEFAULT_FAMILY_ORDER,
) -> list[RasterRow]:
    """Rows grouped by model family in the configured order, then by
    descending score residual within each family."""
    residuals = score_residuals(traces)
    rows = []
    for trace in traces:
        progress, _ = event_progress(trace)
        ticks: list[RasterTick] = []
        for event, p in zip(trace.events, progress):
            width = write_tick_width(event.files_touched) if event.category == "write" else WIDTH_FLOOR
            ticks.append(RasterTick(position=p, color=TICK_COLORS[event.category], width_px=width))
            if event.search_flag:
                ticks.append(RasterTick(position=p, color=SEARCH_COLOR, width_px=WIDTH_FLOOR))
        residual, neutral = residuals[trace.run_id]
        rows.append(
            RasterRow(
                run_id=trace.run_id,
                family_group=trace.model_label,
                residual=residual,
                background="green" if residual >= 0 else "red",
                ticks=tuple(ticks),
                neutral=neutral,
            )
        )

    rank = {name: i for i, name in enumerate(family_order)}

    def key(row: RasterRow):
        return (
            rank.get(row.family_group, len(family_order)),
            row.family_group,
            -row.residual,
            row.run_id,
        )

    return sorted(rows, key=key)


ROW_HEIGHT = 10
TRACK_WIDTH = 820.0
LABEL_WIDTH = 160.0
BACKGROUNDS = {"green": "#e3f2e1", "red": "#f9e0e0"}


def render_raster_svg(rows: list[RasterRow], path: str | Path) -> None:
    """Write the raster as a standalone SVG file, one row per run."""
    height = ROW_HEIGHT * max(1, len(rows)) + 4
    width = LABEL_WIDTH + TRACK_WIDTH + 4
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height}" '
        f'font-family="monospace" font-size="7">'
    ]
    for i, row in enumerate(rows):
        y = 2 + i * ROW_HEIGHT
        bg = BACKGROUNDS[row.background]
        parts.append(
            f'<rect x="{LABEL_WIDTH}" y="{y}" width="{TRACK_WIDTH}" height="{ROW_HEIGHT - 1}" '
            f'fill="{bg}"/>'
        )
        label = f"{row.family_group}/{row.run_id}"
        if row.neutral:
            label += " (no score)"
        parts.append(f'<text x="2" y="{y + ROW_HEIGHT - 3}">{_escape(label)}</text>')
        for tick in row.ticks:
            x = LABEL_WIDTH + tick.position * (TRACK_WIDTH - tick.width_px)
            parts.append(
                f'<rect x="{x:.2f}" y="{y}" width="{tick.width_px:.2f}" '
                f'height="{ROW_HEIGHT - 1}" fill="{tick.color}"/>'
            )
    parts.append("</svg>")
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(parts) + "\n", encoding="utf-8")


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
