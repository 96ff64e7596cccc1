"""Live browser sessions: rendering, extraction, probes, screenshots.

One session has one logical owner at a time. Probes restore the page they
ran on (re-navigating whenever they mutated state), so consecutive probes
see the same document.
"""

from __future__ import annotations

import difflib
import time
from dataclasses import dataclass

from ..errors import InvariantError, PageCrashed, StaleCandidate
from ..model import DomCandidate, InteractionType, PageSnapshot, Size, validate_page_snapshot
from . import scripts
from .outcomes import HREF_DELTA, TEXT_DELTA, ProbeOutcome, StateDelta
from .wire import WireClient, WireError

REPORTABLE_TEXT_DELTA = 0.20
PROBE_INPUT_TEXT = "hello from the evaluator"
_WINDOW_CHROME_PAD = 120


@dataclass(frozen=True)
class SessionConfig:
    endpoint_url: str
    viewport: Size = Size(1280, 800)
    navigation_timeout_ms: int = 15000
    probe_timeout_ms: int = 5000
    settle_delay_ms: int = 500

    def __post_init__(self):
        for name in ("navigation_timeout_ms", "probe_timeout_ms", "settle_delay_ms"):
            if getattr(self, name) <= 0:
                raise InvariantError(f"{name} must be > 0")


def text_change_ratio(before: str, after: str) -> float:
    """Fraction of visible text that changed, via token sequence similarity."""
    if before == after:
        return 0.0
    a, b = before.split(), after.split()
    if not a and not b:
        return 0.0
    return 1.0 - difflib.SequenceMatcher(None, a, b).ratio()


class Session:
    def __init__(self, client: WireClient, session_id: str, config: SessionConfig):
        self._client = client
        self._id = session_id
        self.config = config

    def __enter__(self) -> "Session":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def close(self) -> None:
        self._client.delete_session(self._id)
        self._client.close()

    # -- basics --

    def _settle(self) -> None:
        time.sleep(self.config.settle_delay_ms / 1000.0)

    def navigate(self, url: str) -> None:
        self._client.navigate(self._id, url)
        self._settle()

    def current_url(self) -> str:
        return self._client.current_url(self._id)

    def _execute(self, script: str, args: list | None = None):
        return self._client.execute(self._id, script, args)

    # -- capture --

    def capture_snapshot(self, url: str) -> PageSnapshot:
        """Render a page and extract its visible interactive candidates."""
        self.navigate(url)
        raw = self._execute(scripts.EXTRACT_SNAPSHOT)
        if not isinstance(raw, dict):
            raise PageCrashed(f"extraction returned {type(raw).__name__}")
        links = sorted(set(raw.get("links", [])))
        doc = {
            "url": self.current_url(),
            "viewport": {
                "width": self.config.viewport.width,
                "height": self.config.viewport.height,
            },
            "candidates": raw.get("candidates", []),
            "internal_links": links,
            "headings": raw.get("headings", []),
            "body_digest": raw.get("body_digest", ""),
            "screenshot": None,
            "captured_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }
        return validate_page_snapshot(doc)

    def screenshot(self, url: str) -> bytes:
        """Full-page lossless capture at the configured viewport width."""
        self.navigate(url)
        height = int(self._execute(scripts.PAGE_HEIGHT) or self.config.viewport.height)
        height = min(max(height, int(self.config.viewport.height)), 8000)
        self._client.set_window_rect(
            self._id, int(self.config.viewport.width), height + _WINDOW_CHROME_PAD
        )
        try:
            return self._client.screenshot_png(self._id)
        finally:
            self._client.set_window_rect(
                self._id,
                int(self.config.viewport.width),
                int(self.config.viewport.height) + _WINDOW_CHROME_PAD,
            )

    # -- probing --

    def probe(self, candidate: DomCandidate, interaction: InteractionType) -> ProbeOutcome:
        """Run the interaction-appropriate check and restore the page after.

        Raises StaleCandidate when the element is gone before the probe;
        in-page script failures come back as error outcomes.
        """
        original_url = self.current_url()
        before = self._execute(scripts.PROBE_BEFORE, [candidate.locator])
        if not isinstance(before, dict):
            raise PageCrashed("probe setup returned no data")
        if before.get("error") == "stale":
            raise StaleCandidate(candidate.locator)

        variant = interaction.variant
        if variant == "external_link":
            act = self._execute(scripts.PROBE_ACT, [candidate.locator, "read_href", None])
            if act.get("error"):
                return ProbeOutcome(error=str(act["error"]))
            href = act.get("href", "")
            return ProbeOutcome(
                state_deltas=(
                    StateDelta(HREF_DELTA, before=before["url"], after=href),
                )
                if href
                else (),
            )

        action = "input" if variant == "input" else "click"
        try:
            act = self._execute(
                scripts.PROBE_ACT, [candidate.locator, action, PROBE_INPUT_TEXT]
            )
        except WireError as e:
            self._restore(original_url)
            return ProbeOutcome(error=str(e))
        if not isinstance(act, dict) or act.get("error"):
            self._restore(original_url)
            return ProbeOutcome(error=str(act.get("error") if isinstance(act, dict) else act))

        self._settle()
        after = self._execute(
            scripts.PROBE_AFTER, [candidate.locator, before.get("overlays", [])]
        )
        if not isinstance(after, dict):
            self._restore(original_url)
            return ProbeOutcome(error="probe observation returned no data")

        deltas = list(_state_deltas(before.get("state") or {}, after.get("state")))
        changed_url = after["url"] if after.get("url") != before.get("url") else None
        if changed_url is None:
            ratio = text_change_ratio(before.get("body", ""), after.get("body", ""))
            if ratio >= REPORTABLE_TEXT_DELTA:
                deltas.append(StateDelta(TEXT_DELTA, before="0", after=f"{ratio:.4f}"))

        outcome = ProbeOutcome(
            changed_url=changed_url,
            state_deltas=tuple(deltas),
            overlay_appeared=bool(after.get("overlay_appeared", False)),
            input_accepted=bool(act.get("accepted", False)),
            events_observed=tuple(act.get("dispatched", [])),
        )
        self._restore(original_url)
        return outcome

    def _restore(self, original_url: str) -> None:
        # reload even without a URL change: mutating probes (toggles, inputs,
        # overlays) must not leak state into the next probe
        self.navigate(original_url)


def _state_deltas(before: dict, after: dict | None):
    if after is None:
        return
    for key in sorted(set(before) | set(after)):
        b, a = before.get(key), after.get(key)
        if b != a:
            yield StateDelta(key, before="" if b is None else str(b), after="" if a is None else str(a))


def open_session(config: SessionConfig) -> Session:
    """Create a session against a protocol-compatible browser endpoint."""
    client = WireClient(config.endpoint_url)
    try:
        session_id = client.new_session(
            page_load_timeout_ms=config.navigation_timeout_ms,
            script_timeout_ms=config.probe_timeout_ms,
        )
    except Exception:
        client.close()
        raise
    session = Session(client, session_id, config)
    try:
        client.set_window_rect(
            session_id,
            int(config.viewport.width),
            int(config.viewport.height) + _WINDOW_CHROME_PAD,
        )
    except WireError:
        pass  # headless endpoints may refuse window sizing; extraction still works
    return session
