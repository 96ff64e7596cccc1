"""Interaction-specific behavior verdicts over raw probe evidence."""

from __future__ import annotations

from dataclasses import dataclass
from urllib.parse import urlsplit

from .browser.outcomes import HREF_DELTA, TEXT_DELTA, ProbeOutcome
from .config import BehaviorProfile
from .model import InteractionType


@dataclass(frozen=True)
class BehaviorResult:
    target_id: str
    B: float
    verdict_reason: str
    outcome: ProbeOutcome

    def to_dict(self) -> dict:
        return {
            "target_id": self.target_id,
            "B": self.B,
            "verdict_reason": self.verdict_reason,
            "outcome": self.outcome.to_dict(),
        }


def _origin(url: str) -> tuple[str, str]:
    parts = urlsplit(url)
    return (parts.scheme.lower(), parts.netloc.lower())


def _real_state_deltas(outcome: ProbeOutcome):
    return [d for d in outcome.state_deltas if d.attribute_or_class not in (TEXT_DELTA,)]


def _text_delta_ratio(outcome: ProbeOutcome) -> float:
    for d in outcome.state_deltas:
        if d.attribute_or_class == TEXT_DELTA:
            try:
                return float(d.after)
            except ValueError:
                return 0.0
    return 0.0


def score_behavior(
    target_id: str,
    interaction: InteractionType,
    outcome: ProbeOutcome,
    profile: BehaviorProfile = BehaviorProfile(),
) -> BehaviorResult:
    """Pure verdict function: same (interaction, outcome) in, same B out."""
    if outcome.error:
        return BehaviorResult(target_id, 0.0, f"probe error: {outcome.error}", outcome)

    variant = interaction.variant
    if variant == "navigation":
        if outcome.changed_url:
            return BehaviorResult(
                target_id,
                profile.navigation_url_change,
                f"url changed to {outcome.changed_url}",
                outcome,
            )
        ratio = _text_delta_ratio(outcome)
        if ratio >= profile.content_change_min_ratio:
            return BehaviorResult(
                target_id,
                profile.navigation_content_change,
                f"same-route content change ({ratio:.0%} of visible text)",
                outcome,
            )
        return BehaviorResult(target_id, 0.0, "no navigation observed", outcome)

    if variant == "input":
        has_events = {"input", "change"} <= set(outcome.events_observed)
        if outcome.input_accepted and has_events:
            return BehaviorResult(
                target_id, profile.input_with_events, "value accepted, input/change dispatched",
                outcome,
            )
        if outcome.input_accepted:
            return BehaviorResult(
                target_id, profile.input_without_events, "value accepted without events", outcome
            )
        return BehaviorResult(target_id, 0.0, "value not accepted", outcome)

    if variant == "toggle":
        deltas = _real_state_deltas(outcome)
        if deltas:
            names = ", ".join(sorted({d.attribute_or_class for d in deltas}))
            return BehaviorResult(
                target_id, profile.toggle_state_change, f"state changed: {names}", outcome
            )
        return BehaviorResult(target_id, 0.0, "no state change observed", outcome)

    if variant == "popout":
        if outcome.overlay_appeared:
            return BehaviorResult(target_id, profile.popout_overlay, "overlay appeared", outcome)
        return BehaviorResult(target_id, 0.0, "no overlay appeared", outcome)

    if variant == "external_link":
        for d in outcome.state_deltas:
            if d.attribute_or_class == HREF_DELTA and d.after:
                if _origin(d.after) != _origin(d.before) and _origin(d.after)[1]:
                    return BehaviorResult(
                        target_id, profile.external_link_offsite, f"external href {d.after}", outcome
                    )
                return BehaviorResult(target_id, 0.0, f"href {d.after} is same-origin", outcome)
        return BehaviorResult(target_id, 0.0, "no href exposed", outcome)

    # generic click: any observable effect counts
    if outcome.changed_url or outcome.overlay_appeared or outcome.state_deltas:
        return BehaviorResult(target_id, profile.click_any_effect, "click produced an effect", outcome)
    return BehaviorResult(target_id, 0.0, "click produced no observable effect", outcome)


def score_missing(target_id: str, reason: str = "no matched element") -> BehaviorResult:
    """Verdict for targets with nothing probeable (MISS or text-only tier)."""
    return BehaviorResult(target_id, 0.0, reason, ProbeOutcome())
