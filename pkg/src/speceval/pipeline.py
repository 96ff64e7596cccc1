"""End-to-end evaluation: resolve -> align -> localize -> probe -> score.

One code path serves both backends; the live browser and the snapshot
replay only differ in where snapshots, probe outcomes, and screenshots
come from. Unresolved pages degrade to all-MISS rather than being
excluded, so omitting a hard page never helps the score.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .alignment import IDENTITY, curated_pairs, fit_transform, match_anchors, transform_box
from .behavior import BehaviorResult, score_behavior, score_missing
from .browser.outcomes import ProbeOutcome
from .browser.replay import ReplayBackend
from .browser.session import Session
from .config import ToolkitConfig
from .errors import ProbeTimeout, SpecevalError, StaleCandidate
from .localization import LocalizationResult, assign_page
from .model import (
    AnnotationRow,
    DomCandidate,
    EvaluationReport,
    InteractionType,
    PageAnnotation,
    PageSnapshot,
    TaskAnnotation,
)
from .report import build_report, page_row, render_overlay
from .resolver import crawl, normalize_url, resolve_pages_partial

PROBEABLE_TIERS = {"T1_IOU30", "T2_IOU10", "T3_CENTER150", "T4_CENTER600"}


class LiveBackend:
    """Evaluation source backed by a live browser session."""

    def __init__(self, session: Session):
        self.session = session
        self._current_url: str | None = None

    def discover(self, root_url: str | None, max_pages: int) -> list[PageSnapshot]:
        if not root_url:
            raise ValueError("live evaluation needs a root URL")
        return crawl(self.session.capture_snapshot, root_url, max_pages)

    def capture(self, url: str) -> PageSnapshot | None:
        try:
            return self.session.capture_snapshot(url)
        except SpecevalError:
            return None

    def probe(self, url: str, candidate: DomCandidate, interaction: InteractionType) -> ProbeOutcome:
        if self._current_url != url:
            self.session.navigate(url)
            self._current_url = url
        return self.session.probe(candidate, interaction)

    def screenshot(self, url: str) -> bytes | None:
        try:
            png = self.session.screenshot(url)
        except SpecevalError:
            return None
        self._current_url = None  # screenshot navigates and resizes
        return png


class SnapshotBackend:
    """Evaluation source over recorded snapshots and probe fixtures."""

    def __init__(self, replay: ReplayBackend):
        self.replay = replay

    def discover(self, root_url: str | None, max_pages: int) -> list[PageSnapshot]:
        return self.replay.snapshots[:max_pages]

    def capture(self, url: str) -> PageSnapshot | None:
        try:
            return self.replay.snapshot_for_url(url)
        except SpecevalError:
            return None

    def probe(self, url: str, candidate: DomCandidate, interaction: InteractionType) -> ProbeOutcome:
        return self.replay.probe(url, candidate, interaction)

    def screenshot(self, url: str) -> bytes | None:
        path = self.replay.screenshot_path(url)
        return path.read_bytes() if path else None


@dataclass
class EvaluateOptions:
    root_url: str | None = None
    declared: dict[str, str] = field(default_factory=dict)
    route_patterns: tuple[str, ...] = ()
    curated_anchors: dict = field(default_factory=dict)
    max_pages: int = 40
    jobs: int = 1
    timestamp: str = ""
    overlays: bool = True
    config: ToolkitConfig = field(default_factory=ToolkitConfig)


@dataclass
class PageOutcome:
    page: PageAnnotation
    resolved_url: str | None
    locs: list[LocalizationResult]
    behs: list[BehaviorResult]
    overlay: bytes | None
    notes: list[str]


def _miss_page(page: PageAnnotation, note: str) -> PageOutcome:
    locs = [
        LocalizationResult(
            target_id=t.id, tier="MISS", L=0.0, matched=None,
            iou=0.0, center_distance=float("inf"), text_similarity=0.0,
        )
        for t in page.targets
    ]
    behs = [score_missing(t.id) for t in page.targets]
    return PageOutcome(page, None, locs, behs, None, [note])


def _evaluate_page(
    backend,
    page: PageAnnotation,
    url: str,
    options: EvaluateOptions,
) -> PageOutcome:
    cfg = options.config
    snapshot = backend.capture(url)
    if snapshot is None:
        return _miss_page(page, f"PageUnresolved: {page.page_id} (no snapshot for {url})")

    pairs = match_anchors(page, snapshot, cfg.alignment.anchor_similarity_min)
    pairs += curated_pairs(page, snapshot, options.curated_anchors)
    transform = fit_transform(pairs, cfg.alignment) if pairs else IDENTITY

    targets_with_boxes = [(t, transform_box(transform, t.box)) for t in page.targets]
    locs = assign_page(targets_with_boxes, snapshot, cfg.tiers)

    candidates = {c.locator: c for c in snapshot.candidates}
    behs: list[BehaviorResult] = []
    notes: list[str] = []
    for target, loc in zip(page.targets, locs):
        if loc.tier in PROBEABLE_TIERS and loc.matched:
            candidate = candidates[loc.matched]
            try:
                outcome = backend.probe(snapshot.url, candidate, target.interaction)
            except StaleCandidate as e:
                behs.append(score_missing(target.id, f"StaleCandidate: {e}"))
                continue
            except ProbeTimeout as e:
                behs.append(score_missing(target.id, f"ProbeTimeout: {e}"))
                continue
            behs.append(score_behavior(target.id, target.interaction, outcome, cfg.behavior))
        else:
            behs.append(score_missing(target.id))

    overlay = None
    if options.overlays:
        png = backend.screenshot(snapshot.url)
        if png is not None:
            overlay = render_overlay(
                png, transform, page, locs, {c.locator: c.box for c in snapshot.candidates}
            )
        else:
            notes.append(f"overlay skipped for {page.page_id}: no screenshot")
    return PageOutcome(page, snapshot.url, locs, behs, overlay, notes)


def evaluate_task(
    task: TaskAnnotation,
    backend,
    options: EvaluateOptions | None = None,
) -> tuple[EvaluationReport, dict[str, bytes], list[str]]:
    """Run the whole pipeline; returns (report, overlays, warnings).

    Warnings carry PageUnresolved notes; the report still covers every
    annotation (unresolved pages score zero).
    """
    options = options or EvaluateOptions()
    cfg = options.config
    snapshots = backend.discover(options.root_url, options.max_pages)
    resolutions, unresolved = resolve_pages_partial(
        task, snapshots, options.declared, options.route_patterns, cfg.resolver
    )
    url_by_page = {r.page_id: r.url for r in resolutions}

    outcomes: dict[str, PageOutcome] = {}
    resolved_pages = [p for p in task.pages if p.page_id in url_by_page]

    def run_page(page: PageAnnotation) -> PageOutcome:
        return _evaluate_page(backend, page, url_by_page[page.page_id], options)

    if options.jobs > 1 and isinstance(backend, SnapshotBackend):
        with ThreadPoolExecutor(max_workers=options.jobs) as pool:
            for page, outcome in zip(resolved_pages, pool.map(run_page, resolved_pages)):
                outcomes[page.page_id] = outcome
    else:
        for page in resolved_pages:  # live sessions have one owner: stay serial
            outcomes[page.page_id] = run_page(page)

    for page_id in unresolved:
        page = task.page(page_id)
        outcomes[page_id] = _miss_page(page, f"PageUnresolved: {page_id}")

    rows: list[AnnotationRow] = []
    pages = []
    overlays: dict[str, bytes] = {}
    notes: list[str] = []
    for page in task.pages:
        outcome = outcomes[page.page_id]
        behs_by_id = {b.target_id: b for b in outcome.behs}
        for target, loc in zip(page.targets, outcome.locs):
            b = behs_by_id[target.id]
            diagnostics = []
            if loc.iou > 0:
                diagnostics.append(f"iou={loc.iou:.3f}")
            if loc.matched and loc.center_distance != float("inf"):
                diagnostics.append(f"center={loc.center_distance:.1f}px")
            if b.verdict_reason:
                diagnostics.append(b.verdict_reason)
            rows.append(
                AnnotationRow(
                    target_id=target.id,
                    page_id=page.page_id,
                    tier_name=loc.tier,
                    L=loc.L,
                    B=b.B,
                    matched_locator=loc.matched,
                    diagnostics="; ".join(diagnostics),
                )
            )
        pages.append(page_row(page.page_id, outcome.resolved_url, outcome.locs, outcome.behs))
        if outcome.overlay is not None:
            overlays[page.page_id] = outcome.overlay
        notes.extend(outcome.notes)

    overlay_refs = [f"overlays/{pid}.png" for pid in overlays]
    report = build_report(
        task_name=task.task_name,
        generated_at=options.timestamp
        or time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        rows=rows,
        pages=pages,
        overlay_refs=overlay_refs,
        notes=notes,
    )
    warnings = [n for n in notes if n.startswith("PageUnresolved")]
    return report, overlays, warnings


def open_snapshot_backend(snapshot_dir: str | Path) -> SnapshotBackend:
    return SnapshotBackend(ReplayBackend.from_dir(snapshot_dir))
