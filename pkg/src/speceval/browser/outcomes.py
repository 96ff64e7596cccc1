"""Raw probe evidence and the recorded-probe fixture store.

A ProbeOutcome carries everything a probe observed; turning observations
into scores is the behavior module's job. Synthetic delta names:

* ``text_delta_ratio`` — fraction of visible text that changed without a
  URL change (recorded only when it reaches the reportable threshold);
* ``href`` — for external-link probes, before = the page URL, after = the
  element's resolved absolute href.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..errors import SchemaError
from ..model import read_json

TEXT_DELTA = "text_delta_ratio"
HREF_DELTA = "href"


@dataclass(frozen=True)
class StateDelta:
    attribute_or_class: str
    before: str
    after: str

    def to_dict(self) -> dict:
        return {
            "attribute_or_class": self.attribute_or_class,
            "before": self.before,
            "after": self.after,
        }


@dataclass(frozen=True)
class ProbeOutcome:
    changed_url: str | None = None
    state_deltas: tuple[StateDelta, ...] = ()
    overlay_appeared: bool = False
    input_accepted: bool = False
    events_observed: tuple[str, ...] = ()
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "changed_url": self.changed_url,
            "state_deltas": [d.to_dict() for d in self.state_deltas],
            "overlay_appeared": self.overlay_appeared,
            "input_accepted": self.input_accepted,
            "events_observed": list(self.events_observed),
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProbeOutcome":
        if not isinstance(d, dict):
            raise SchemaError("probe outcome: expected an object")
        deltas = []
        for raw in d.get("state_deltas", []):
            deltas.append(
                StateDelta(
                    attribute_or_class=str(raw.get("attribute_or_class", "")),
                    before=str(raw.get("before", "")),
                    after=str(raw.get("after", "")),
                )
            )
        return cls(
            changed_url=d.get("changed_url"),
            state_deltas=tuple(deltas),
            overlay_appeared=bool(d.get("overlay_appeared", False)),
            input_accepted=bool(d.get("input_accepted", False)),
            events_observed=tuple(str(e) for e in d.get("events_observed", [])),
            error=d.get("error"),
        )


@dataclass
class ProbeBook:
    """Recorded probe fixtures keyed by (url, locator, interaction variant)."""

    outcomes: dict[tuple[str, str, str], ProbeOutcome] = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | Path) -> "ProbeBook":
        doc = read_json(path)
        if not isinstance(doc, dict) or not isinstance(doc.get("probes"), list):
            raise SchemaError(f"{path}: expected an object with a 'probes' list")
        book = cls()
        for i, entry in enumerate(doc["probes"]):
            if not isinstance(entry, dict):
                raise SchemaError(f"{path}: probes[{i}] must be an object")
            key = (
                str(entry.get("url", "")),
                str(entry.get("locator", "")),
                str(entry.get("interaction", "")),
            )
            book.outcomes[key] = ProbeOutcome.from_dict(entry.get("outcome", {}))
        return book

    def lookup(self, url: str, locator: str, variant: str) -> ProbeOutcome:
        hit = self.outcomes.get((url, locator, variant))
        if hit is None:
            return ProbeOutcome(error=f"no recorded probe for {locator!r} ({variant}) on {url}")
        return hit

    def to_dict(self) -> dict:
        return {
            "format_version": 1,
            "probes": [
                {"url": url, "locator": locator, "interaction": variant, "outcome": o.to_dict()}
                for (url, locator, variant), o in sorted(self.outcomes.items())
            ],
        }
