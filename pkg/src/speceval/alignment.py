"""Mockup-to-page coordinate alignment.

A page-level per-axis affine transform x' = s_x*x + t_x, y' = s_y*y + t_y
is fitted by weighted least squares over matched semantic anchors, with one
round of residual trimming and a scale clamp against degenerate fits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import AlignmentConfig
from .model import BoundingBox, DomCandidate, PageAnnotation, PageSnapshot, Point
from .textmatch import best_text_similarity

ANCHOR_SOURCES = ("matched_link", "distinctive_control", "textual_cue", "curated")

_CONTROL_TAGS = {"button", "input", "select", "textarea", "switch", "checkbox", "radio"}


@dataclass(frozen=True)
class AffineTransform2D:
    s_x: float
    t_x: float
    s_y: float
    t_y: float

    def apply(self, p: Point) -> Point:
        return Point(self.s_x * p.x + self.t_x, self.s_y * p.y + self.t_y)

    def to_dict(self) -> dict:
        return {"s_x": self.s_x, "t_x": self.t_x, "s_y": self.s_y, "t_y": self.t_y}


IDENTITY = AffineTransform2D(1.0, 0.0, 1.0, 0.0)


@dataclass(frozen=True)
class AnchorPair:
    mockup_point: Point
    rendered_point: Point
    weight: float
    source: str = "textual_cue"


def _pair_source(candidate: DomCandidate) -> str:
    tag = candidate.tag_or_role.lower()
    if tag in ("a", "area", "link") or "href" in candidate.attributes:
        return "matched_link"
    if tag in _CONTROL_TAGS:
        return "distinctive_control"
    return "textual_cue"


def match_anchors(
    page: PageAnnotation,
    snapshot: PageSnapshot,
    similarity_min: float = AlignmentConfig().anchor_similarity_min,
) -> list[AnchorPair]:
    """Pair each labeled anchor with the candidate whose text best matches it.

    Anchors without a sufficiently similar candidate are dropped; a candidate
    may back several anchors (anchors are evidence, not assignments).
    """
    pairs: list[AnchorPair] = []
    for anchor in page.anchors:
        best: DomCandidate | None = None
        best_sim = 0.0
        for candidate in snapshot.candidates:
            sim = best_text_similarity(anchor.token, candidate.text, candidate.attributes)
            if sim > best_sim:
                best, best_sim = candidate, sim
        if best is not None and best_sim >= similarity_min:
            pairs.append(
                AnchorPair(
                    mockup_point=anchor.point,
                    rendered_point=best.box.center,
                    weight=best_sim,
                    source=_pair_source(best),
                )
            )
    return pairs


def curated_pairs(page: PageAnnotation, snapshot: PageSnapshot, curated_doc: dict) -> list[AnchorPair]:
    """Explicit mockup-point -> locator pairs supplied alongside the task."""
    pairs = []
    by_locator = {c.locator: c for c in snapshot.candidates}
    for entry in curated_doc.get("pairs", []):
        if entry.get("page_id") != page.page_id:
            continue
        candidate = by_locator.get(entry.get("locator", ""))
        if candidate is None:
            continue
        p = entry.get("mockup_point", {})
        pairs.append(
            AnchorPair(
                mockup_point=Point(float(p["x"]), float(p["y"])),
                rendered_point=candidate.box.center,
                weight=1.0,
                source="curated",
            )
        )
    return pairs


def _weighted_median(values: list[float], weights: list[float]) -> float:
    order = sorted(range(len(values)), key=lambda i: values[i])
    total = sum(weights)
    acc = 0.0
    for i in order:
        acc += weights[i]
        if acc >= total / 2.0:
            return values[i]
    return values[order[-1]]


def _fit_axis(coords: list[float], rendered: list[float], weights: list[float]) -> tuple[float, float]:
    """Weighted least squares for one axis; falls back to pure offset when
    the mockup coordinates carry no spread."""
    if not coords:
        return 1.0, 0.0
    if len(set(coords)) < 2:
        offsets = [r - c for c, r in zip(coords, rendered)]
        return 1.0, _weighted_median(offsets, weights)
    total = sum(weights)
    mx = sum(w * c for w, c in zip(weights, coords)) / total
    mr = sum(w * r for w, r in zip(weights, rendered)) / total
    sxx = sum(w * (c - mx) ** 2 for w, c in zip(weights, coords))
    sxr = sum(w * (c - mx) * (r - mr) for w, c, r in zip(weights, coords, rendered))
    s = sxr / sxx
    return s, mr - s * mx


def _fit_once(pairs: list[AnchorPair]) -> AffineTransform2D:
    weights = [p.weight for p in pairs]
    s_x, t_x = _fit_axis([p.mockup_point.x for p in pairs], [p.rendered_point.x for p in pairs], weights)
    s_y, t_y = _fit_axis([p.mockup_point.y for p in pairs], [p.rendered_point.y for p in pairs], weights)
    return AffineTransform2D(s_x, t_x, s_y, t_y)


def _residual(t: AffineTransform2D, pair: AnchorPair) -> float:
    predicted = t.apply(pair.mockup_point)
    return math.hypot(
        predicted.x - pair.rendered_point.x, predicted.y - pair.rendered_point.y
    )


def _clamp_axis(
    s: float, coords: list[float], rendered: list[float], weights: list[float],
    lo: float, hi: float,
) -> tuple[float, float]:
    clamped = min(hi, max(lo, s))
    # refit the offset under the clamped scale so boxes stay centered
    total = sum(weights)
    t = sum(w * (r - clamped * c) for w, c, r, in zip(weights, coords, rendered)) / total
    return clamped, t


def fit_transform(
    pairs: list[AnchorPair], config: AlignmentConfig = AlignmentConfig()
) -> AffineTransform2D:
    """Fit the per-axis transform; degenerate inputs fall back, never fail."""
    if not pairs:
        return IDENTITY
    # canonical order makes the fit invariant to caller-side pair ordering
    pairs = sorted(
        pairs,
        key=lambda p: (p.mockup_point.x, p.mockup_point.y,
                       p.rendered_point.x, p.rendered_point.y, p.weight),
    )
    fit = _fit_once(pairs)
    residuals = [_residual(fit, p) for p in pairs]
    med = sorted(residuals)[len(residuals) // 2]
    if med > 1e-9:
        kept = [p for p, r in zip(pairs, residuals) if r <= config.trim_factor * med]
        if 2 <= len(kept) < len(pairs):
            fit = _fit_once(kept)
            pairs = kept

    weights = [p.weight for p in pairs]
    s_x, t_x = fit.s_x, fit.t_x
    s_y, t_y = fit.s_y, fit.t_y
    if not config.scale_min <= s_x <= config.scale_max:
        s_x, t_x = _clamp_axis(
            s_x, [p.mockup_point.x for p in pairs], [p.rendered_point.x for p in pairs],
            weights, config.scale_min, config.scale_max,
        )
    if not config.scale_min <= s_y <= config.scale_max:
        s_y, t_y = _clamp_axis(
            s_y, [p.mockup_point.y for p in pairs], [p.rendered_point.y for p in pairs],
            weights, config.scale_min, config.scale_max,
        )
    return AffineTransform2D(s_x, t_x, s_y, t_y)


def transform_box(t: AffineTransform2D, box: BoundingBox) -> BoundingBox:
    return BoundingBox(
        x=t.s_x * box.x + t.t_x,
        y=t.s_y * box.y + t.t_y,
        width=t.s_x * box.width,
        height=t.s_y * box.height,
    )
