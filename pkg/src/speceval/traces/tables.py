"""Aligned plaintext tables for diff-score and trajectory output."""

from __future__ import annotations

from .diffscore import DiffScoreResult
from .trajectory import CATEGORY_ORDER, TrajectorySummary


def format_table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    def fmt(row):
        return "  ".join(cell.ljust(w) if i == 0 else cell.rjust(w)
                         for i, (cell, w) in enumerate(zip(row, widths)))
    lines = [fmt(headers), "  ".join("-" * w for w in widths)]
    lines.extend(fmt(row) for row in rows)
    return "\n".join(lines)


DIFF_COLUMNS = [
    "Surgical",
    "Strict",
    "Edit share",
    "Diff byte",
    "Targetedness",
    "Rewrite share",
    "Median edit ratio",
]


def diff_row(result: DiffScoreResult) -> list[str]:
    return [
        f"{result.surgical:.1f}",
        f"{result.strict:.1f}",
        f"{result.A:.3f}",
        f"{result.B_comp:.3f}",
        f"{result.C:.3f}",
        f"{result.rewrite_share:.3f}",
        f"{result.median_edit_ratio:.3f}",
    ]


def diffscore_table(rows: list[tuple[str, DiffScoreResult]], label: str = "Run") -> str:
    return format_table(
        [label] + DIFF_COLUMNS,
        [[name] + diff_row(res) for name, res in rows],
    )


def trajectory_tables(label: str, summary: TrajectorySummary) -> str:
    cats = [c.capitalize() for c in CATEGORY_ORDER]
    mix_rows = [
        [f"{i * 10}-{(i + 1) * 10}%"] + [f"{v:.3f}" for v in row]
        for i, row in enumerate(summary.bin_mix)
    ]
    mix = format_table(["Progress"] + cats, mix_rows)
    trans_rows = [
        [f"{cat} (n={summary.row_counts[i]})"] + [f"{v:.3f}" for v in summary.transitions[i]]
        for i, cat in enumerate(CATEGORY_ORDER)
    ]
    trans = format_table(["From \\ To"] + cats, trans_rows)
    parts = [f"== {label}: action mix by progress bin ==", mix,
             f"== {label}: action transitions (row-normalized) ==", trans]
    if summary.warnings:
        parts.append("warnings:")
        parts.extend(f"  - {w}" for w in summary.warnings)
    return "\n".join(parts)
