"""Independent brute-force oracle for the editing-style scores.

Deliberately does NOT import the package under test. Works directly on raw
(kind, before, old, new) tuples, recomputing every quantity from first
principles in the plainest possible way. Kept separate so the production
implementation and this oracle can only agree by both being right.

Run as a script to print the frozen worked examples:

    python3 tests/oracles/diffscore_oracle.py
"""

from __future__ import annotations

import math


def account(kind: str, before: int, old: int, new: int) -> dict:
    """Byte accounting for one mutation, straight from the definitions."""
    if kind == "Write":
        after = new
        change = before if before > after else after
        ratio = 1.0
    elif kind == "Edit":
        after = before - old + new
        if after < 0:
            after = 0
        change = old if old > new else new
        ratio = (change / after) if after > 0 else 1.0
    elif kind == "Delete":
        after = 0
        change = before
        ratio = 1.0
    else:
        raise ValueError(kind)
    return {"kind": kind, "after": after, "change": change, "ratio": ratio}


def oracle_scores(raw_mutations: list[tuple[str, int, int, int]]) -> dict:
    """Compute every score component by direct enumeration."""
    accounted = [account(k, b, o, n) for (k, b, o, n) in raw_mutations]
    edits = [m for m in accounted if m["kind"] == "Edit"]

    n_total = len(accounted)
    n_edit = len(edits)
    a = n_edit / n_total if n_total else 0.0

    total_change = sum(m["change"] for m in accounted)
    edit_change = sum(m["change"] for m in edits)
    b = edit_change / total_change if total_change > 0 else 0.0

    weight_sum = 0.0
    weighted_target = 0.0
    for m in edits:
        w = math.sqrt(m["change"])
        r = m["ratio"]
        if r > 1.0:
            r = 1.0
        weight_sum += w
        weighted_target += w * (1.0 - r)
    c = weighted_target / weight_sum if weight_sum > 0 else 0.0

    small = sum(1 for m in edits if m["ratio"] < 0.1)
    medium = sum(1 for m in edits if 0.1 <= m["ratio"] < 0.5)
    large = sum(1 for m in edits if m["ratio"] >= 0.5)

    ratios = sorted(m["ratio"] for m in edits)
    if not ratios:
        median_ratio = 0.0
    else:
        mid = len(ratios) // 2
        median_ratio = ratios[mid] if len(ratios) % 2 else (ratios[mid - 1] + ratios[mid]) / 2.0

    return {
        "A": a,
        "B": b,
        "C": c,
        "surgical": 100.0 * (0.40 * a + 0.30 * b + 0.30 * c),
        "strict": 100.0 * a * (0.5 * b + 0.5 * c),
        "median_edit_ratio": median_ratio,
        "rewrite_share": 1.0 - a,
        "locality": {"small": small, "medium": medium, "large": large},
    }


# Worked examples, frozen. Each is (raw mutations, label).
WORKED_EXAMPLES = [
    ([("Edit", 1000, 10, 10)], "single tiny edit"),
    ([("Write", 0, 0, 1000), ("Edit", 1000, 20, 30)], "write then small edit"),
    ([("Write", 0, 0, 100), ("Write", 100, 0, 400), ("Write", 400, 0, 50)], "all writes"),
    (
        [
            ("Write", 0, 0, 2048),
            ("Edit", 2048, 100, 220),
            ("Edit", 2168, 512, 512),
            ("Delete", 300, 0, 0),
            ("Edit", 2168, 4000, 100),
        ],
        "mixed stream with clipped ratio",
    ),
]


if __name__ == "__main__":
    for raw, label in WORKED_EXAMPLES:
        scores = oracle_scores(raw)
        print(f"--- {label} ---")
        for key in ("A", "B", "C", "surgical", "strict", "median_edit_ratio", "rewrite_share"):
            print(f"  {key} = {scores[key]!r}")
        print(f"  locality = {scores['locality']}")
