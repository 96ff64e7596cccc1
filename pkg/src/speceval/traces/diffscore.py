"""Editing-style scores over byte-accounted mutation streams.

surgical = 100 * (0.40*A + 0.30*B + 0.30*C)
strict   = 100 * A * (0.5*B + 0.5*C)

where A is the edit-event share, B the edit share of touched bytes, and C
a sqrt(change)-weighted mean of (1 - clipped edit ratio). The sqrt
weighting keeps swarms of one-liners and single huge edits from each
dominating C.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass

from ..errors import DegenerateVariance, EmptyMutationStream
from ..model import MutationAction, RunTrace

W_EDIT_SHARE = 0.40
W_BYTE_SHARE = 0.30
W_TARGETEDNESS = 0.30

LOCALITY_SMALL = 0.1
LOCALITY_LARGE = 0.5


@dataclass(frozen=True)
class DiffScoreResult:
    A: float
    B_comp: float
    C: float
    surgical: float
    strict: float
    median_edit_ratio: float
    rewrite_share: float
    locality_counts: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "A": self.A,
            "B_comp": self.B_comp,
            "C": self.C,
            "surgical": self.surgical,
            "strict": self.strict,
            "median_edit_ratio": self.median_edit_ratio,
            "rewrite_share": self.rewrite_share,
            "locality_counts": dict(self.locality_counts),
        }


def edit_ratio(m: MutationAction) -> float:
    """Touched bytes over resulting size; non-Edit actions carry 1.0."""
    if m.kind != "Edit":
        return 1.0
    if m.after_bytes <= 0:
        # the edit emptied the file: as untargeted as it gets
        return 1.0
    return m.change_bytes / m.after_bytes


def compute_diff_score(trace: RunTrace) -> DiffScoreResult:
    mutations = trace.mutations
    if not mutations:
        raise EmptyMutationStream(f"run {trace.run_id!r} has no file mutations")

    edits = [m for m in mutations if m.kind == "Edit"]
    a = len(edits) / len(mutations)

    total_change = sum(m.change_bytes for m in mutations)
    edit_change = sum(m.change_bytes for m in edits)
    b = edit_change / total_change if total_change > 0 else 0.0

    ratios = [min(edit_ratio(m), 1.0) for m in edits]
    weights = [math.sqrt(m.change_bytes) for m in edits]
    weight_sum = sum(weights)
    if weight_sum > 0:
        c = sum(w * (1.0 - r) for w, r in zip(weights, ratios)) / weight_sum
    else:
        c = 0.0  # no edits (or only zero-byte ones): nothing targeted to credit

    locality = {
        "small": sum(1 for r in ratios if r < LOCALITY_SMALL),
        "medium": sum(1 for r in ratios if LOCALITY_SMALL <= r < LOCALITY_LARGE),
        "large": sum(1 for r in ratios if r >= LOCALITY_LARGE),
    }

    return DiffScoreResult(
        A=a,
        B_comp=b,
        C=c,
        surgical=100.0 * (W_EDIT_SHARE * a + W_BYTE_SHARE * b + W_TARGETEDNESS * c),
        strict=100.0 * a * (0.5 * b + 0.5 * c),
        median_edit_ratio=statistics.median(ratios) if ratios else 0.0,
        rewrite_share=1.0 - a,
        locality_counts=locality,
    )


def correlate(xs: list[float], ys: list[float]) -> float:
    """Pearson product-moment correlation."""
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    n = len(xs)
    if n < 2:
        raise ValueError("need at least two points")
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    dx = [x - mean_x for x in xs]
    dy = [y - mean_y for y in ys]
    var_x = sum(d * d for d in dx)
    var_y = sum(d * d for d in dy)
    if var_x == 0.0 or var_y == 0.0:
        raise DegenerateVariance("constant series have no defined correlation")
    return sum(a * b for a, b in zip(dx, dy)) / math.sqrt(var_x * var_y)
