"""Mapping annotated reference pages onto URLs of the generated app.

Combines declared mappings (which win outright), crawl-discovered DOM
signatures, and optional source-level route patterns. Assignment is greedy
by descending confidence and injective: no two pages may claim one URL.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable
from urllib.parse import urlsplit, urlunsplit

from .config import ResolverConfig
from .errors import InvariantError, PageUnresolved, SpecevalError
from .model import PageAnnotation, PageSnapshot, TaskAnnotation
from .textmatch import best_text_similarity, jaccard, tokens


@dataclass(frozen=True)
class Evidence:
    signal: str
    score: float

    def to_dict(self) -> dict:
        return {"signal": self.signal, "score": self.score}


@dataclass(frozen=True)
class ResolutionResult:
    page_id: str
    url: str
    confidence: float
    evidence: tuple[Evidence, ...]

    def to_dict(self) -> dict:
        return {
            "page_id": self.page_id,
            "url": self.url,
            "confidence": self.confidence,
            "evidence": [e.to_dict() for e in self.evidence],
        }


def normalize_url(url: str) -> str:
    parts = urlsplit(url)
    scheme = parts.scheme.lower()
    netloc = parts.netloc.lower()
    for default in (("http", ":80"), ("https", ":443")):
        if scheme == default[0] and netloc.endswith(default[1]):
            netloc = netloc[: -len(default[1])]
    path = parts.path or "/"
    return urlunsplit((scheme, netloc, path, parts.query, ""))


def same_origin(a: str, b: str) -> bool:
    pa, pb = urlsplit(a), urlsplit(b)
    return (pa.scheme.lower(), pa.netloc.lower()) == (pb.scheme.lower(), pb.netloc.lower())


def crawl(
    fetch: Callable[[str], PageSnapshot],
    root_url: str,
    max_pages: int,
) -> list[PageSnapshot]:
    """Breadth-first same-origin crawl, deduplicated by normalized URL.

    `fetch` renders one URL into a snapshot (live session or replay). Fetch
    failures beyond the root yield partial results rather than aborting.
    """
    if max_pages < 1:
        raise ValueError("max_pages must be >= 1")
    root_norm = normalize_url(root_url)
    queue: deque[str] = deque([root_url])
    seen: set[str] = {root_norm}
    out: list[PageSnapshot] = []
    first = True
    while queue and len(out) < max_pages:
        url = queue.popleft()
        try:
            snapshot = fetch(url)
        except SpecevalError:
            if first:
                raise
            continue
        finally:
            first = False
        out.append(snapshot)
        seen.add(normalize_url(snapshot.url))
        for link in snapshot.internal_links:
            if not same_origin(link, snapshot.url):
                continue
            norm = normalize_url(link)
            if norm not in seen:
                seen.add(norm)
                queue.append(link)
    return out


def _route_regex(pattern: str) -> re.Pattern:
    parts = []
    for segment in pattern.strip().strip("/").split("/"):
        if segment in ("*", "**"):
            parts.append("[^/]+" if segment == "*" else ".*")
        elif segment.startswith(":") or (segment.startswith("[") and segment.endswith("]")):
            parts.append("[^/]+")
        else:
            parts.append(re.escape(segment))
    return re.compile("^/" + "/".join(parts) + "/?$")


def _route_tokens(pattern: str) -> frozenset[str]:
    static = [
        seg
        for seg in pattern.strip().strip("/").split("/")
        if seg and not seg.startswith(":") and not seg.startswith("[") and seg not in ("*", "**")
    ]
    return tokens(" ".join(static))


def signature_score(
    page: PageAnnotation,
    snapshot: PageSnapshot,
    route_patterns: Iterable[str] = (),
    config: ResolverConfig = ResolverConfig(),
) -> tuple[float, tuple[Evidence, ...]]:
    """Weighted DOM-signature similarity between a page and a snapshot."""
    # anchors: mean over anchors of the best token-Jaccard hit among
    # candidate strings and headings
    anchor_scores = []
    for anchor in page.anchors:
        best = 0.0
        for c in snapshot.candidates:
            best = max(best, best_text_similarity(anchor.token, c.text, c.attributes))
        a_tokens = tokens(anchor.token)
        for h in snapshot.headings:
            best = max(best, jaccard(a_tokens, tokens(h)))
        anchor_scores.append(best)
    anchor_signal = sum(anchor_scores) / len(anchor_scores) if anchor_scores else 0.0

    page_tokens = tokens(page.page_id)
    heading_signal = max(
        (jaccard(page_tokens, tokens(h)) for h in snapshot.headings), default=0.0
    )

    n_targets, n_candidates = len(page.targets), len(snapshot.candidates)
    if n_targets == 0 and n_candidates == 0:
        count_signal = 1.0
    elif n_targets == 0 or n_candidates == 0:
        count_signal = 0.0
    else:
        count_signal = min(n_targets, n_candidates) / max(n_targets, n_candidates)

    path = urlsplit(snapshot.url).path
    url_signal = jaccard(page_tokens, tokens(path))

    score = (
        config.weight_anchor * anchor_signal
        + config.weight_heading * heading_signal
        + config.weight_count * count_signal
        + config.weight_url * url_signal
    )
    evidence = [
        Evidence("dom_signature", score),
        Evidence("crawl", 1.0),
    ]
    bonus = 0.0
    for pattern in route_patterns:
        if not pattern.strip():
            continue
        if _route_regex(pattern).match(path) and (_route_tokens(pattern) & page_tokens):
            bonus = config.route_bonus
            break
    if bonus:
        evidence.append(Evidence("route_pattern", bonus))
    return min(1.0, score + bonus), tuple(evidence)


def resolve_pages_partial(
    task: TaskAnnotation,
    snapshots: list[PageSnapshot],
    declared: dict[str, str] | None = None,
    route_patterns: Iterable[str] = (),
    config: ResolverConfig = ResolverConfig(),
) -> tuple[list[ResolutionResult], list[str]]:
    """Resolve every page, returning (results, unresolved page_ids)."""
    declared = declared or {}
    results: dict[str, ResolutionResult] = {}
    taken: set[str] = set()

    for page in task.pages:
        url = declared.get(page.page_id) or page.declared_url
        if url:
            norm = normalize_url(url)
            if norm in taken:
                raise InvariantError(
                    f"declared mapping reuses URL {url!r} (page {page.page_id!r})"
                )
            taken.add(norm)
            results[page.page_id] = ResolutionResult(
                page_id=page.page_id,
                url=url,
                confidence=1.0,
                evidence=(Evidence("declared", 1.0),),
            )

    pending = [p for p in task.pages if p.page_id not in results]
    ranked: dict[str, list[tuple[float, str, tuple[Evidence, ...]]]] = {}
    for page in pending:
        rows = []
        for snap in snapshots:
            score, evidence = signature_score(page, snap, route_patterns, config)
            rows.append((score, snap.url, evidence))
        # descending score, then URL order for determinism
        ranked[page.page_id] = sorted(rows, key=lambda t: (-t[0], t[1]))

    unresolved: list[str] = []
    order = {p.page_id: i for i, p in enumerate(task.pages)}
    remaining = [p.page_id for p in pending]
    while remaining:
        best_pick = None  # (score, page order, page_id, url, evidence)
        for pid in remaining:
            for score, url, evidence in ranked[pid]:
                if normalize_url(url) in taken:
                    continue
                if best_pick is None or (score, -order[pid]) > (best_pick[0], -order[best_pick[1]]):
                    best_pick = (score, pid, url, evidence)
                break
        if best_pick is None or best_pick[0] < config.floor:
            unresolved.extend(sorted(remaining, key=lambda p: order[p]))
            break
        score, pid, url, evidence = best_pick
        taken.add(normalize_url(url))
        remaining.remove(pid)
        results[pid] = ResolutionResult(
            page_id=pid, url=url, confidence=score, evidence=evidence
        )

    ordered = [results[p.page_id] for p in task.pages if p.page_id in results]
    return ordered, unresolved


def resolve_pages(
    task: TaskAnnotation,
    snapshots: list[PageSnapshot],
    declared: dict[str, str] | None = None,
    route_patterns: Iterable[str] = (),
    config: ResolverConfig = ResolverConfig(),
) -> list[ResolutionResult]:
    """Strict variant: raises PageUnresolved for the first unmappable page."""
    results, unresolved = resolve_pages_partial(task, snapshots, declared, route_patterns, config)
    if unresolved:
        raise PageUnresolved(unresolved[0], "no candidate above the confidence floor")
    return results
