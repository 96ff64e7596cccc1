"""Deterministic snapshot-replay backend.

Evaluation over recorded snapshots shares the pipeline with the live
browser: snapshots come from `*.snapshot.json` files and probe outcomes
from recorded `*.probes.json` fixtures, so results are reproducible with
no browser at all.
"""

from __future__ import annotations

from pathlib import Path

from ..errors import SchemaError
from ..model import DomCandidate, InteractionType, PageSnapshot, load_page_snapshot
from .outcomes import ProbeBook, ProbeOutcome


def replay_snapshot(path: str | Path) -> PageSnapshot:
    """Load one recorded snapshot; identical output on every call."""
    return load_page_snapshot(path)


class ReplayBackend:
    def __init__(self, snapshots: list[PageSnapshot], probes: ProbeBook | None = None,
                 root: Path | None = None):
        self._by_url = {s.url: s for s in snapshots}
        self.probes = probes or ProbeBook()
        self.root = root

    @classmethod
    def from_dir(cls, directory: str | Path) -> "ReplayBackend":
        root = Path(directory)
        if not root.is_dir():
            raise SchemaError(f"snapshot directory not found: {root}")
        snapshot_paths = sorted(root.glob("*.snapshot.json"))
        if not snapshot_paths:
            raise SchemaError(f"{root}: no *.snapshot.json files")
        snapshots = [replay_snapshot(p) for p in snapshot_paths]
        probes = ProbeBook()
        for p in sorted(root.glob("*.probes.json")):
            probes.outcomes.update(ProbeBook.load(p).outcomes)
        return cls(snapshots, probes, root=root)

    @property
    def snapshots(self) -> list[PageSnapshot]:
        return [self._by_url[u] for u in sorted(self._by_url)]

    def snapshot_for_url(self, url: str) -> PageSnapshot:
        try:
            return self._by_url[url]
        except KeyError:
            raise SchemaError(f"no recorded snapshot for {url}") from None

    def probe(self, url: str, candidate: DomCandidate, interaction: InteractionType) -> ProbeOutcome:
        return self.probes.lookup(url, candidate.locator, interaction.variant)

    def screenshot_path(self, url: str) -> Path | None:
        snap = self._by_url.get(url)
        if snap is None or not snap.screenshot or self.root is None:
            return None
        p = self.root / snap.screenshot
        return p if p.exists() else None
