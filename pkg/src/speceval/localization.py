"""Target-to-candidate matching via the progressive tier criterion.

Tier thresholds and scores come from TierConfig; the defaults are
IoU >= 0.30 -> 1.00, IoU >= 0.10 -> 0.60, center <= 150px -> 0.30,
center <= 600px -> 0.15, text fallback -> 0.10, miss -> 0.00.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import TierConfig
from .model import BoundingBox, DomCandidate, InteractionType, InteractiveTarget, PageSnapshot
from .textmatch import best_text_similarity

INPUT_TAGS = {"input", "textarea", "select"}
INPUT_ROLES = {"textbox", "searchbox", "combobox", "spinbutton", "slider"}
NON_TEXT_INPUT_TYPES = {"checkbox", "radio", "button", "submit", "reset", "image"}
TOGGLE_ROLES = {"switch", "checkbox", "radio", "menuitemcheckbox", "menuitemradio", "tab"}
TOGGLE_STATE_ATTRS = ("aria-checked", "aria-pressed", "aria-expanded", "aria-selected")
LINK_TAGS = {"a", "area", "link"}
NAV_ATTRS = ("href", "data-href", "routerlink", "to")


@dataclass(frozen=True)
class LocalizationResult:
    target_id: str
    tier: str
    L: float
    matched: str | None
    iou: float
    center_distance: float
    text_similarity: float

    def to_dict(self) -> dict:
        return {
            "target_id": self.target_id,
            "tier": self.tier,
            "L": self.L,
            "matched": self.matched,
            "iou": self.iou,
            "center_distance": self.center_distance if math.isfinite(self.center_distance) else None,
            "text_similarity": self.text_similarity,
        }


def iou(a: BoundingBox, b: BoundingBox) -> float:
    ix = min(a.x + a.width, b.x + b.width) - max(a.x, b.x)
    iy = min(a.y + a.height, b.y + b.height) - max(a.y, b.y)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    return inter / (a.area + b.area - inter)


def center_distance(a: BoundingBox, b: BoundingBox) -> float:
    ca, cb = a.center, b.center
    return math.hypot(ca.x - cb.x, ca.y - cb.y)


def _role(candidate: DomCandidate) -> str:
    return candidate.attributes.get("role", "").lower()


def _is_input_candidate(c: DomCandidate) -> bool:
    tag = c.tag_or_role.lower()
    if tag == "input":
        return c.attributes.get("type", "text").lower() not in NON_TEXT_INPUT_TYPES
    if tag in INPUT_TAGS:
        return True
    if tag in INPUT_ROLES or _role(c) in INPUT_ROLES:
        return True
    return c.attributes.get("contenteditable", "").lower() == "true"


def _is_toggle_candidate(c: DomCandidate) -> bool:
    tag = c.tag_or_role.lower()
    if tag == "input" and c.attributes.get("type", "").lower() in ("checkbox", "radio"):
        return True
    if tag in TOGGLE_ROLES or _role(c) in TOGGLE_ROLES:
        return True
    return any(a in c.attributes for a in TOGGLE_STATE_ATTRS)


def _is_link_candidate(c: DomCandidate) -> bool:
    tag = c.tag_or_role.lower()
    if tag in LINK_TAGS or _role(c) == "link":
        return True
    return any(a in c.attributes for a in NAV_ATTRS)


def eligible_candidates(
    interaction: InteractionType, snapshot: PageSnapshot
) -> list[DomCandidate]:
    """Filter snapshot candidates down to the ones type-compatible with an
    annotation: inputs for input targets, toggleables for toggles, links for
    navigation, everything for popout/click."""
    variant = interaction.variant
    if variant == "input":
        return [c for c in snapshot.candidates if _is_input_candidate(c)]
    if variant == "toggle":
        return [c for c in snapshot.candidates if _is_toggle_candidate(c)]
    if variant in ("navigation", "external_link"):
        return [c for c in snapshot.candidates if _is_link_candidate(c)]
    return list(snapshot.candidates)


def _pick(
    candidates: list[DomCandidate],
    target_box: BoundingBox,
    key,
) -> tuple[DomCandidate, float]:
    """argmax of key with the spec tie-break: IoU desc, center distance asc,
    document order."""
    best = None
    best_key = None
    for i, c in enumerate(candidates):
        k = (key(c), -iou(target_box, c.box), center_distance(target_box, c.box), i)
        if best_key is None or (k[0] > best_key[0]) or (
            k[0] == best_key[0] and k[1:] < best_key[1:]
        ):
            best, best_key = c, k
    return best, best_key[0]


def localize(
    target_box_rendered: BoundingBox,
    target: InteractiveTarget,
    candidates: list[DomCandidate],
    tiers: TierConfig = TierConfig(),
) -> LocalizationResult:
    """Match one transformed target box against a candidate pool."""
    scores = tiers.scores
    if not candidates:
        return LocalizationResult(
            target_id=target.id, tier="MISS", L=scores["MISS"], matched=None,
            iou=0.0, center_distance=math.inf, text_similarity=0.0,
        )

    best_iou_c, best_iou = _pick(candidates, target_box_rendered, lambda c: iou(target_box_rendered, c.box))
    if best_iou >= tiers.iou_t1:
        tier = "T1_IOU30"
    elif best_iou >= tiers.iou_t2:
        tier = "T2_IOU10"
    else:
        tier = None
    if tier:
        return LocalizationResult(
            target_id=target.id, tier=tier, L=scores[tier], matched=best_iou_c.locator,
            iou=best_iou,
            center_distance=center_distance(target_box_rendered, best_iou_c.box),
            text_similarity=best_text_similarity(
                target.description, best_iou_c.text, best_iou_c.attributes
            ),
        )

    best_center_c, neg_dist = _pick(
        candidates, target_box_rendered, lambda c: -center_distance(target_box_rendered, c.box)
    )
    dist = -neg_dist
    if dist <= tiers.center_t4:
        tier = "T3_CENTER150" if dist <= tiers.center_t3 else "T4_CENTER600"
        return LocalizationResult(
            target_id=target.id, tier=tier, L=scores[tier], matched=best_center_c.locator,
            iou=iou(target_box_rendered, best_center_c.box),
            center_distance=dist,
            text_similarity=best_text_similarity(
                target.description, best_center_c.text, best_center_c.attributes
            ),
        )

    best_text_c, best_sim = _pick(
        candidates, target_box_rendered,
        lambda c: best_text_similarity(target.description, c.text, c.attributes),
    )
    if best_sim >= tiers.text_t5:
        return LocalizationResult(
            target_id=target.id, tier="T5_TEXT", L=scores["T5_TEXT"], matched=best_text_c.locator,
            iou=iou(target_box_rendered, best_text_c.box),
            center_distance=center_distance(target_box_rendered, best_text_c.box),
            text_similarity=best_sim,
        )

    return LocalizationResult(
        target_id=target.id, tier="MISS", L=scores["MISS"], matched=None,
        iou=best_iou, center_distance=dist, text_similarity=best_sim,
    )


def assign_page(
    targets_with_boxes: list[tuple[InteractiveTarget, BoundingBox]],
    snapshot: PageSnapshot,
    tiers: TierConfig = TierConfig(),
) -> list[LocalizationResult]:
    """Greedy one-to-one page assignment.

    Targets are processed in descending best-available-IoU order; a candidate
    matched by one target leaves every other target's pool, which penalizes
    collapsed structure where one giant clickable would otherwise absorb all
    annotations. Results come back in the input target order.
    """
    pools = {
        t.id: eligible_candidates(t.interaction, snapshot) for t, _ in targets_with_boxes
    }
    order = sorted(
        range(len(targets_with_boxes)),
        key=lambda i: (
            -max(
                (iou(targets_with_boxes[i][1], c.box) for c in pools[targets_with_boxes[i][0].id]),
                default=0.0,
            ),
            i,
        ),
    )
    consumed: set[str] = set()
    results: dict[int, LocalizationResult] = {}
    for i in order:
        target, box = targets_with_boxes[i]
        pool = [c for c in pools[target.id] if c.locator not in consumed]
        result = localize(box, target, pool, tiers)
        if result.matched is not None:
            consumed.add(result.matched)
        results[i] = result
    return [results[i] for i in range(len(targets_with_boxes))]
