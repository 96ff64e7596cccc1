"""Workflow trajectories: progress-binned action mixes and transition matrices."""

from __future__ import annotations

from dataclasses import dataclass

from ..model import RunTrace, TraceEvent

CATEGORY_ORDER = ("inspect", "write", "verify", "failure", "other")
N_BINS = 10

_CAT_INDEX = {c: i for i, c in enumerate(CATEGORY_ORDER)}


@dataclass(frozen=True)
class TrajectorySummary:
    """Per-model action composition over progress plus local workflow grammar.

    bin_mix rows are proportions per progress bin (write events weighted by
    files touched); transitions rows are probabilities conditioned on the
    current action, with row_counts carrying the raw n per row.
    """

    bin_mix: tuple[tuple[float, ...], ...]
    transitions: tuple[tuple[float, ...], ...]
    row_counts: tuple[int, ...]
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "categories": list(CATEGORY_ORDER),
            "bin_mix": [list(row) for row in self.bin_mix],
            "transitions": [list(row) for row in self.transitions],
            "row_counts": list(self.row_counts),
            "warnings": list(self.warnings),
        }


def event_progress(trace: RunTrace) -> tuple[list[float], str | None]:
    """Normalized [0,1] progress per event.

    Falls back to event-index progress when any timestamp is missing;
    zero-duration runs put everything at progress 0 with a warning.
    """
    events = trace.events
    if not events:
        raise ValueError(f"run {trace.run_id!r} has no events")
    n = len(events)
    stamps = [e.timestamp for e in events]
    if any(t is None for t in stamps):
        if n == 1:
            return [0.0], None
        return [i / (n - 1) for i in range(n)], None
    start, end = stamps[0], stamps[-1]
    if end == start:
        return [0.0] * n, (
            f"run {trace.run_id!r}: zero duration; all events binned at progress 0"
        )
    return [(t - start) / (end - start) for t in stamps], None


def _bin_of(progress: float) -> int:
    return min(N_BINS - 1, int(progress * N_BINS))


def event_weight(event: TraceEvent) -> int:
    return event.files_touched if event.category == "write" else 1


def _summarize(traces: list[RunTrace]) -> TrajectorySummary:
    mass = [[0.0] * len(CATEGORY_ORDER) for _ in range(N_BINS)]
    counts = [[0] * len(CATEGORY_ORDER) for _ in range(len(CATEGORY_ORDER))]
    warnings: list[str] = []
    for trace in traces:
        progress, warning = event_progress(trace)
        if warning:
            warnings.append(warning)
        for event, p in zip(trace.events, progress):
            mass[_bin_of(p)][_CAT_INDEX[event.category]] += event_weight(event)
        for cur, nxt in zip(trace.events, trace.events[1:]):
            counts[_CAT_INDEX[cur.category]][_CAT_INDEX[nxt.category]] += 1

    bin_mix = []
    for row in mass:
        total = sum(row)
        bin_mix.append(tuple(v / total for v in row) if total > 0 else tuple(row))
    transitions = []
    row_counts = []
    for row in counts:
        total = sum(row)
        row_counts.append(total)
        transitions.append(tuple(v / total for v in row) if total > 0 else tuple(float(v) for v in row))
    return TrajectorySummary(
        bin_mix=tuple(bin_mix),
        transitions=tuple(transitions),
        row_counts=tuple(row_counts),
        warnings=tuple(warnings),
    )


def compute_trajectory(traces: list[RunTrace]) -> dict[str, TrajectorySummary]:
    """One TrajectorySummary per model label, aggregated over its runs."""
    by_model: dict[str, list[RunTrace]] = {}
    for t in traces:
        by_model.setdefault(t.model_label, []).append(t)
    return {label: _summarize(runs) for label, runs in sorted(by_model.items())}
