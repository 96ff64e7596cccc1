"""Shared domain types, file schemas, and schema validation.

All types are immutable after construction and safe to share across
workers. File formats are versioned JSON documents; loaders raise
SchemaError for structural problems and InvariantError for domain-rule
violations, always naming the offending page/target/event.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, NamedTuple

from .errors import InvariantError, NegativeBytes, SchemaError

FORMAT_VERSION = 1

INTERACTION_VARIANTS = frozenset(
    {"navigation", "input", "toggle", "external_link", "popout", "click"}
)
EVENT_CATEGORIES = frozenset({"inspect", "write", "verify", "failure", "other"})
MUTATION_KINDS = frozenset({"Write", "Edit", "Delete"})

_ANCHOR_LABEL_RE = re.compile(r"^<[^<>\s]+>$")


class Point(NamedTuple):
    x: float
    y: float


class Size(NamedTuple):
    width: float
    height: float


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in mockup or rendered-page pixels."""

    x: float
    y: float
    width: float
    height: float

    def __post_init__(self):
        for name in ("x", "y", "width", "height"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise InvariantError(f"box {name} must be a finite number, got {v!r}")
        if self.width <= 0 or self.height <= 0:
            raise InvariantError(
                f"box must have positive size, got {self.width}x{self.height}"
            )

    @property
    def center(self) -> Point:
        return Point(self.x + self.width / 2.0, self.y + self.height / 2.0)

    @property
    def area(self) -> float:
        return self.width * self.height

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "width": self.width, "height": self.height}

    @classmethod
    def from_dict(cls, d: dict, where: str = "box") -> "BoundingBox":
        _expect_mapping(d, where)
        try:
            return cls(
                _finite(d["x"], f"{where}.x"),
                _finite(d["y"], f"{where}.y"),
                _finite(d["width"], f"{where}.width"),
                _finite(d["height"], f"{where}.height"),
            )
        except KeyError as e:
            raise SchemaError(f"{where}: missing field {e.args[0]!r}") from None


@dataclass(frozen=True)
class InteractionType:
    variant: str
    subtype: str | None = None

    def __post_init__(self):
        if self.variant not in INTERACTION_VARIANTS:
            raise InvariantError(
                f"unknown interaction variant {self.variant!r}; "
                f"expected one of {sorted(INTERACTION_VARIANTS)}"
            )

    def to_dict(self) -> dict:
        return {"variant": self.variant, "subtype": self.subtype}


@dataclass(frozen=True)
class InteractiveTarget:
    """One annotated control the generated app is expected to implement."""

    id: str
    page_id: str
    box: BoundingBox
    interaction: InteractionType
    description: str | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "page_id": self.page_id,
            "box": self.box.to_dict(),
            "interaction": self.interaction.to_dict(),
            "description": self.description,
        }


@dataclass(frozen=True)
class VisualAnchor:
    """A labeled stable point used to fit the mockup-to-page transform."""

    label: str
    point: Point
    page_id: str

    def __post_init__(self):
        if not _ANCHOR_LABEL_RE.match(self.label):
            raise InvariantError(
                f"anchor label {self.label!r} must look like <name> with a nonempty token"
            )

    @property
    def token(self) -> str:
        return self.label[1:-1]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "point": {"x": self.point.x, "y": self.point.y},
            "page_id": self.page_id,
        }


@dataclass(frozen=True)
class PageAnnotation:
    page_id: str
    mockup_image: str
    mockup_size: Size
    targets: tuple[InteractiveTarget, ...]
    anchors: tuple[VisualAnchor, ...]
    declared_url: str | None = None

    def to_dict(self) -> dict:
        return {
            "page_id": self.page_id,
            "mockup_image": self.mockup_image,
            "mockup_size": {"width": self.mockup_size.width, "height": self.mockup_size.height},
            "targets": [t.to_dict() for t in self.targets],
            "anchors": [a.to_dict() for a in self.anchors],
            "declared_url": self.declared_url,
        }


@dataclass(frozen=True)
class TaskAnnotation:
    task_name: str
    pages: tuple[PageAnnotation, ...]
    condition_label: str | None = None

    def page(self, page_id: str) -> PageAnnotation:
        for p in self.pages:
            if p.page_id == page_id:
                return p
        raise KeyError(page_id)

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "task_name": self.task_name,
            "condition_label": self.condition_label,
            "pages": [p.to_dict() for p in self.pages],
        }


@dataclass(frozen=True)
class DomCandidate:
    """A visible interactive element extracted from a rendered page."""

    locator: str
    tag_or_role: str
    box: BoundingBox
    text: str
    attributes: dict[str, str] = field(default_factory=dict)
    visible: bool = True

    def __post_init__(self):
        if not self.visible:
            raise InvariantError(
                f"candidate {self.locator!r}: hidden candidates must be filtered upstream"
            )

    def to_dict(self) -> dict:
        return {
            "locator": self.locator,
            "tag_or_role": self.tag_or_role,
            "box": self.box.to_dict(),
            "text": self.text,
            "attributes": dict(self.attributes),
            "visible": self.visible,
        }


@dataclass(frozen=True)
class PageSnapshot:
    url: str
    viewport: Size
    candidates: tuple[DomCandidate, ...]
    internal_links: tuple[str, ...]
    headings: tuple[str, ...]
    body_digest: str
    screenshot: str | None = None
    captured_at: str = ""

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "url": self.url,
            "viewport": {"width": self.viewport.width, "height": self.viewport.height},
            "candidates": [c.to_dict() for c in self.candidates],
            "internal_links": list(self.internal_links),
            "headings": list(self.headings),
            "body_digest": self.body_digest,
            "screenshot": self.screenshot,
            "captured_at": self.captured_at,
        }


@dataclass(frozen=True)
class MutationAction:
    """One byte-accounted file mutation from an agent run."""

    kind: str
    path: str
    before_bytes: int
    old_bytes: int
    new_bytes: int
    after_bytes: int
    change_bytes: int
    timestamp: float = 0.0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "path": self.path,
            "before_bytes": self.before_bytes,
            "old_bytes": self.old_bytes,
            "new_bytes": self.new_bytes,
            "after_bytes": self.after_bytes,
            "change_bytes": self.change_bytes,
            "timestamp": self.timestamp,
        }


@dataclass(frozen=True)
class TraceEvent:
    """One categorized timeline event from an agent run."""

    timestamp: float | None
    category: str
    search_flag: bool = False
    files_touched: int = 1
    raw_kind: str = ""
    command_text: str | None = None

    def __post_init__(self):
        if self.category not in EVENT_CATEGORIES:
            raise InvariantError(f"unknown event category {self.category!r}")
        if self.files_touched < 1:
            raise InvariantError("files_touched must be >= 1")

    def to_dict(self) -> dict:
        return {
            "timestamp": self.timestamp,
            "category": self.category,
            "search_flag": self.search_flag,
            "files_touched": self.files_touched,
            "raw_kind": self.raw_kind,
            "command_text": self.command_text,
        }


@dataclass(frozen=True)
class RunTrace:
    run_id: str
    model_label: str
    condition_label: str
    task_label: str
    events: tuple[TraceEvent, ...]
    mutations: tuple[MutationAction, ...]
    scaffold_manifest: dict[str, int] = field(default_factory=dict)
    score: float | None = None

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "run_id": self.run_id,
            "model_label": self.model_label,
            "condition_label": self.condition_label,
            "task_label": self.task_label,
            "score": self.score,
            "events": [e.to_dict() for e in self.events],
            "mutations": [m.to_dict() for m in self.mutations],
            "scaffold_manifest": dict(self.scaffold_manifest),
        }


@dataclass(frozen=True)
class AnnotationRow:
    """Per-annotation evaluation outcome."""

    target_id: str
    page_id: str
    tier_name: str
    L: float
    B: float
    matched_locator: str | None
    diagnostics: str

    def to_dict(self) -> dict:
        return {
            "target_id": self.target_id,
            "page_id": self.page_id,
            "tier_name": self.tier_name,
            "L": self.L,
            "B": self.B,
            "matched_locator": self.matched_locator,
            "diagnostics": self.diagnostics,
        }


@dataclass(frozen=True)
class PageRow:
    page_id: str
    resolved_url: str | None
    mean_L: float
    mean_B: float
    S_page: float

    def to_dict(self) -> dict:
        return {
            "page_id": self.page_id,
            "resolved_url": self.resolved_url,
            "mean_L": self.mean_L,
            "mean_B": self.mean_B,
            "S_page": self.S_page,
        }


@dataclass(frozen=True)
class ReportAggregate:
    S: float
    mean_L: float
    mean_B: float
    N: int

    def to_dict(self) -> dict:
        return {"S": self.S, "mean_L": self.mean_L, "mean_B": self.mean_B, "N": self.N}


@dataclass(frozen=True)
class EvaluationReport:
    task_name: str
    generated_at: str
    per_annotation: tuple[AnnotationRow, ...]
    per_page: tuple[PageRow, ...]
    aggregate: ReportAggregate
    overlay_refs: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "task_name": self.task_name,
            "generated_at": self.generated_at,
            "per_annotation": [r.to_dict() for r in self.per_annotation],
            "per_page": [p.to_dict() for p in self.per_page],
            "aggregate": self.aggregate.to_dict(),
            "overlay_refs": list(self.overlay_refs),
            "notes": list(self.notes),
        }


# --- parsing helpers -------------------------------------------------------


def _expect_mapping(d: Any, where: str) -> None:
    if not isinstance(d, dict):
        raise SchemaError(f"{where}: expected an object, got {type(d).__name__}")


def _finite(v: Any, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SchemaError(f"{where}: expected a finite number, got {v!r}")
    return float(v)


def _string(d: dict, key: str, where: str, optional: bool = False) -> str | None:
    v = d.get(key)
    if v is None:
        if optional:
            return None
        raise SchemaError(f"{where}: missing field {key!r}")
    if not isinstance(v, str):
        raise SchemaError(f"{where}.{key}: expected a string, got {type(v).__name__}")
    return v


def _check_version(doc: dict, where: str) -> None:
    v = doc.get("format_version", FORMAT_VERSION)
    if not isinstance(v, int) or v < 1:
        raise SchemaError(f"{where}: bad format_version {v!r}")
    if v > FORMAT_VERSION:
        raise SchemaError(f"{where}: format_version {v} is newer than supported ({FORMAT_VERSION})")


def _point_from(d: dict, where: str) -> Point:
    if "point" in d:
        p = d["point"]
        _expect_mapping(p, f"{where}.point")
        return Point(_finite(p.get("x"), f"{where}.point.x"), _finite(p.get("y"), f"{where}.point.y"))
    if "box" in d:
        # box-form anchors are accepted and reduced to their center
        box = BoundingBox.from_dict(d["box"], f"{where}.box")
        return box.center
    raise SchemaError(f"{where}: needs a 'point' or a 'box'")


def _size_from(d: dict, key: str, where: str) -> Size:
    v = d.get(key)
    if v is None:
        raise SchemaError(f"{where}: missing field {key!r}")
    _expect_mapping(v, f"{where}.{key}")
    w = _finite(v.get("width"), f"{where}.{key}.width")
    h = _finite(v.get("height"), f"{where}.{key}.height")
    if w <= 0 or h <= 0:
        raise InvariantError(f"{where}.{key}: size must be positive, got {w}x{h}")
    return Size(w, h)


def read_json(path: str | Path) -> Any:
    p = Path(path)
    if not p.exists():
        raise SchemaError(f"file not found: {p}")
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise SchemaError(f"{p}: not valid JSON ({e})") from e


def canonical_json(obj: Any) -> str:
    """Stable serialization: same document in, same bytes out."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(canonical_json(obj), encoding="utf-8")


# --- task annotation -------------------------------------------------------


def validate_task_annotation(doc: Any) -> TaskAnnotation:
    """Parse and validate a raw annotation document.

    Raises SchemaError for structural problems and InvariantError for
    domain violations (anchor counts, duplicate labels, out-of-bounds
    boxes), naming the offending page/target in the message.
    """
    _expect_mapping(doc, "annotation")
    _check_version(doc, "annotation")
    task_name = _string(doc, "task_name", "annotation")
    condition_label = _string(doc, "condition_label", "annotation", optional=True)
    raw_pages = doc.get("pages")
    if not isinstance(raw_pages, list):
        raise SchemaError("annotation: missing field 'pages'")
    if not raw_pages:
        raise InvariantError("annotation: pages must be nonempty")

    pages: list[PageAnnotation] = []
    seen_pages: set[str] = set()
    seen_target_ids: set[str] = set()
    for i, rp in enumerate(raw_pages):
        where = f"pages[{i}]"
        _expect_mapping(rp, where)
        page_id = _string(rp, "page_id", where)
        where = f"page {page_id!r}"
        if page_id in seen_pages:
            raise InvariantError(f"{where}: duplicate page_id")
        seen_pages.add(page_id)
        mockup_image = _string(rp, "mockup_image", where)
        mockup_size = _size_from(rp, "mockup_size", where)
        declared_url = _string(rp, "declared_url", where, optional=True)

        raw_anchors = rp.get("anchors")
        if not isinstance(raw_anchors, list):
            raise SchemaError(f"{where}: missing field 'anchors'")
        if not 2 <= len(raw_anchors) <= 5:
            raise InvariantError(f"{where}: anchors: expected 2..5, got {len(raw_anchors)}")
        anchors: list[VisualAnchor] = []
        seen_labels: set[str] = set()
        for j, ra in enumerate(raw_anchors):
            awhere = f"{where}.anchors[{j}]"
            _expect_mapping(ra, awhere)
            label = _string(ra, "label", awhere)
            if label in seen_labels:
                raise InvariantError(f"{where}: duplicate anchor label {label!r}")
            seen_labels.add(label)
            point = _point_from(ra, awhere)
            try:
                anchors.append(VisualAnchor(label=label, point=point, page_id=page_id))
            except InvariantError as e:
                raise InvariantError(f"{where}: {e}") from None

        raw_targets = rp.get("targets")
        if not isinstance(raw_targets, list):
            raise SchemaError(f"{where}: missing field 'targets'")
        targets: list[InteractiveTarget] = []
        for j, rt in enumerate(raw_targets):
            twhere = f"{where}.targets[{j}]"
            _expect_mapping(rt, twhere)
            tid = _string(rt, "id", twhere)
            twhere = f"{where}, target {tid!r}"
            if tid in seen_target_ids:
                raise InvariantError(f"{twhere}: duplicate target id")
            seen_target_ids.add(tid)
            t_page = rt.get("page_id", page_id)
            if t_page != page_id:
                raise InvariantError(f"{twhere}: page_id {t_page!r} does not match containing page")
            box = BoundingBox.from_dict(rt.get("box"), f"{twhere}.box")
            if (
                box.x < 0
                or box.y < 0
                or box.x + box.width > mockup_size.width
                or box.y + box.height > mockup_size.height
            ):
                raise InvariantError(
                    f"{twhere}: box {box.to_dict()} lies outside mockup "
                    f"{mockup_size.width}x{mockup_size.height}"
                )
            ri = rt.get("interaction")
            _expect_mapping(ri, f"{twhere}.interaction")
            variant = _string(ri, "variant", f"{twhere}.interaction")
            try:
                interaction = InteractionType(variant, _string(ri, "subtype", twhere, optional=True))
            except InvariantError as e:
                raise InvariantError(f"{twhere}: {e}") from None
            targets.append(
                InteractiveTarget(
                    id=tid,
                    page_id=page_id,
                    box=box,
                    interaction=interaction,
                    description=_string(rt, "description", twhere, optional=True),
                )
            )

        pages.append(
            PageAnnotation(
                page_id=page_id,
                mockup_image=mockup_image,
                mockup_size=mockup_size,
                targets=tuple(targets),
                anchors=tuple(anchors),
                declared_url=declared_url,
            )
        )

    return TaskAnnotation(task_name=task_name, pages=tuple(pages), condition_label=condition_label)


def load_task_annotation(path: str | Path) -> TaskAnnotation:
    return validate_task_annotation(read_json(path))


def save_task_annotation(task: TaskAnnotation, path: str | Path) -> None:
    write_json(path, task.to_dict())


# --- page snapshot ---------------------------------------------------------


def validate_page_snapshot(doc: Any) -> PageSnapshot:
    _expect_mapping(doc, "snapshot")
    _check_version(doc, "snapshot")
    url = _string(doc, "url", "snapshot")
    viewport = _size_from(doc, "viewport", "snapshot")
    raw = doc.get("candidates")
    if not isinstance(raw, list):
        raise SchemaError("snapshot: missing field 'candidates'")
    candidates: list[DomCandidate] = []
    for i, rc in enumerate(raw):
        where = f"snapshot.candidates[{i}]"
        _expect_mapping(rc, where)
        locator = _string(rc, "locator", where)
        box = BoundingBox.from_dict(rc.get("box"), f"{where}.box")
        # below-fold content is fine; sideways runaways are not
        if box.x <= -viewport.width or box.x >= 4 * viewport.width or box.y <= -viewport.height:
            raise InvariantError(
                f"{where} ({locator!r}): box origin ({box.x},{box.y}) outside the "
                f"bounded viewport superset"
            )
        visible = rc.get("visible", True)
        if not isinstance(visible, bool):
            raise SchemaError(f"{where}.visible: expected a boolean")
        attrs = rc.get("attributes", {})
        _expect_mapping(attrs, f"{where}.attributes")
        try:
            candidates.append(
                DomCandidate(
                    locator=locator,
                    tag_or_role=_string(rc, "tag_or_role", where),
                    box=box,
                    text=_string(rc, "text", where, optional=True) or "",
                    attributes={str(k): str(v) for k, v in attrs.items()},
                    visible=visible,
                )
            )
        except InvariantError as e:
            raise InvariantError(f"{where}: {e}") from None
    links = doc.get("internal_links", [])
    headings = doc.get("headings", [])
    if not isinstance(links, list) or not isinstance(headings, list):
        raise SchemaError("snapshot: internal_links and headings must be lists")
    return PageSnapshot(
        url=url,
        viewport=viewport,
        candidates=tuple(candidates),
        internal_links=tuple(str(u) for u in links),
        headings=tuple(str(h) for h in headings),
        body_digest=_string(doc, "body_digest", "snapshot", optional=True) or "",
        screenshot=_string(doc, "screenshot", "snapshot", optional=True),
        captured_at=_string(doc, "captured_at", "snapshot", optional=True) or "",
    )


def load_page_snapshot(path: str | Path) -> PageSnapshot:
    return validate_page_snapshot(read_json(path))


def save_page_snapshot(snapshot: PageSnapshot, path: str | Path) -> None:
    write_json(path, snapshot.to_dict())


# --- mutations and traces --------------------------------------------------


def normalize_mutation(
    kind: str,
    path: str,
    before_bytes: int,
    old_bytes: int = 0,
    new_bytes: int = 0,
    timestamp: float = 0.0,
) -> MutationAction:
    """Fill after_bytes/change_bytes from raw byte counts per mutation kind.

    Write: after = new, change = max(before, after). Edit: after =
    max(0, before - old + new), change = max(old, new). Delete: after = 0,
    change = before. old_bytes is ignored for Write; old/new for Delete.
    """
    if kind not in MUTATION_KINDS:
        raise InvariantError(f"unknown mutation kind {kind!r}")
    for name, v in (("before_bytes", before_bytes), ("old_bytes", old_bytes), ("new_bytes", new_bytes)):
        if not isinstance(v, int) or isinstance(v, bool):
            raise NegativeBytes(f"{name} must be an integer, got {v!r}")
        if v < 0:
            raise NegativeBytes(f"{name} must be >= 0, got {v}")
    if kind == "Write":
        old_bytes = 0
        after = new_bytes
        change = max(before_bytes, after)
    elif kind == "Edit":
        after = max(0, before_bytes - old_bytes + new_bytes)
        change = max(old_bytes, new_bytes)
    else:  # Delete
        old_bytes = new_bytes = 0
        after = 0
        change = before_bytes
    return MutationAction(
        kind=kind,
        path=path,
        before_bytes=before_bytes,
        old_bytes=old_bytes,
        new_bytes=new_bytes,
        after_bytes=after,
        change_bytes=change,
        timestamp=timestamp,
    )


def validate_run_trace(doc: Any) -> RunTrace:
    _expect_mapping(doc, "trace")
    _check_version(doc, "trace")
    raw_events = doc.get("events", [])
    raw_mutations = doc.get("mutations", [])
    if not isinstance(raw_events, list) or not isinstance(raw_mutations, list):
        raise SchemaError("trace: events and mutations must be lists")

    events: list[TraceEvent] = []
    for i, re_ in enumerate(raw_events):
        where = f"trace.events[{i}]"
        _expect_mapping(re_, where)
        ts = re_.get("timestamp")
        if ts is not None:
            ts = _finite(ts, f"{where}.timestamp")
        ft = re_.get("files_touched", 1)
        if not isinstance(ft, int) or isinstance(ft, bool):
            raise SchemaError(f"{where}.files_touched: expected an integer")
        try:
            events.append(
                TraceEvent(
                    timestamp=ts,
                    category=_string(re_, "category", where),
                    search_flag=bool(re_.get("search_flag", False)),
                    files_touched=ft,
                    raw_kind=_string(re_, "raw_kind", where, optional=True) or "",
                    command_text=_string(re_, "command_text", where, optional=True),
                )
            )
        except InvariantError as e:
            raise InvariantError(f"{where}: {e}") from None

    mutations: list[MutationAction] = []
    for i, rm in enumerate(raw_mutations):
        where = f"trace.mutations[{i}]"
        _expect_mapping(rm, where)
        kind = _string(rm, "kind", where)
        m = normalize_mutation(
            kind,
            _string(rm, "path", where),
            int(rm.get("before_bytes", 0)),
            int(rm.get("old_bytes", 0)),
            int(rm.get("new_bytes", 0)),
            _finite(rm.get("timestamp", 0.0), f"{where}.timestamp"),
        )
        for fname in ("after_bytes", "change_bytes"):
            if fname in rm and int(rm[fname]) != getattr(m, fname):
                raise InvariantError(
                    f"{where}: stored {fname}={rm[fname]} contradicts the {kind} rule "
                    f"(expected {getattr(m, fname)})"
                )
        mutations.append(m)

    for name, stamps in (
        ("events", [e.timestamp for e in events if e.timestamp is not None]),
        ("mutations", [m.timestamp for m in mutations]),
    ):
        if any(b < a for a, b in zip(stamps, stamps[1:])):
            raise InvariantError(f"trace: {name} timestamps must be nondecreasing")

    manifest = doc.get("scaffold_manifest", {})
    _expect_mapping(manifest, "trace.scaffold_manifest")
    score = doc.get("score")
    if score is not None:
        score = _finite(score, "trace.score")
    return RunTrace(
        run_id=_string(doc, "run_id", "trace"),
        model_label=_string(doc, "model_label", "trace", optional=True) or "",
        condition_label=_string(doc, "condition_label", "trace", optional=True) or "",
        task_label=_string(doc, "task_label", "trace", optional=True) or "",
        events=tuple(events),
        mutations=tuple(mutations),
        scaffold_manifest={str(k): int(v) for k, v in manifest.items()},
        score=score,
    )


def load_run_trace(path: str | Path) -> RunTrace:
    return validate_run_trace(read_json(path))


def save_run_trace(trace: RunTrace, path: str | Path) -> None:
    write_json(path, trace.to_dict())


def load_scaffold_manifest(path: str | Path) -> dict[str, int]:
    doc = read_json(path)
    _expect_mapping(doc, "scaffold manifest")
    files = doc.get("files") if set(doc) <= {"format_version", "files"} else doc
    _expect_mapping(files, "scaffold manifest files")
    out: dict[str, int] = {}
    for k, v in files.items():
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise SchemaError(f"scaffold manifest: {k!r} must map to a byte count >= 0")
        out[str(k)] = v
    return out


# --- evaluation report -----------------------------------------------------

_RECOMPUTE_TOL = 1e-12


def validate_evaluation_report(doc: Any) -> EvaluationReport:
    _expect_mapping(doc, "report")
    _check_version(doc, "report")
    raw_rows = doc.get("per_annotation")
    if not isinstance(raw_rows, list):
        raise SchemaError("report: missing field 'per_annotation'")
    rows: list[AnnotationRow] = []
    for i, rr in enumerate(raw_rows):
        where = f"report.per_annotation[{i}]"
        _expect_mapping(rr, where)
        L = _finite(rr.get("L"), f"{where}.L")
        B = _finite(rr.get("B"), f"{where}.B")
        if not (0.0 <= L <= 1.0 and 0.0 <= B <= 1.0):
            raise InvariantError(f"{where}: L and B must lie in [0,1], got L={L}, B={B}")
        rows.append(
            AnnotationRow(
                target_id=_string(rr, "target_id", where),
                page_id=_string(rr, "page_id", where, optional=True) or "",
                tier_name=_string(rr, "tier_name", where),
                L=L,
                B=B,
                matched_locator=_string(rr, "matched_locator", where, optional=True),
                diagnostics=_string(rr, "diagnostics", where, optional=True) or "",
            )
        )
    raw_pages = doc.get("per_page", [])
    if not isinstance(raw_pages, list):
        raise SchemaError("report: per_page must be a list")
    pages = []
    for i, rp in enumerate(raw_pages):
        where = f"report.per_page[{i}]"
        _expect_mapping(rp, where)
        pages.append(
            PageRow(
                page_id=_string(rp, "page_id", where),
                resolved_url=_string(rp, "resolved_url", where, optional=True),
                mean_L=_finite(rp.get("mean_L"), f"{where}.mean_L"),
                mean_B=_finite(rp.get("mean_B"), f"{where}.mean_B"),
                S_page=_finite(rp.get("S_page"), f"{where}.S_page"),
            )
        )
    agg = doc.get("aggregate")
    _expect_mapping(agg, "report.aggregate")
    aggregate = ReportAggregate(
        S=_finite(agg.get("S"), "report.aggregate.S"),
        mean_L=_finite(agg.get("mean_L"), "report.aggregate.mean_L"),
        mean_B=_finite(agg.get("mean_B"), "report.aggregate.mean_B"),
        N=int(agg.get("N", len(rows))),
    )
    if aggregate.N != len(rows):
        raise InvariantError(f"report: aggregate.N={aggregate.N} but {len(rows)} annotation rows")
    if rows:
        recomputed = sum(r.L * r.B for r in rows) / len(rows)
        if abs(recomputed - aggregate.S) > _RECOMPUTE_TOL:
            raise InvariantError(
                f"report: stored S={aggregate.S} differs from recomputed {recomputed}"
            )
    if not (0.0 <= aggregate.S <= 1.0):
        raise InvariantError(f"report: S={aggregate.S} outside [0,1]")
    return EvaluationReport(
        task_name=_string(doc, "task_name", "report", optional=True) or "",
        generated_at=_string(doc, "generated_at", "report", optional=True) or "",
        per_annotation=tuple(rows),
        per_page=tuple(pages),
        aggregate=aggregate,
        overlay_refs=tuple(str(r) for r in doc.get("overlay_refs", [])),
        notes=tuple(str(n) for n in doc.get("notes", [])),
    )


def load_evaluation_report(path: str | Path) -> EvaluationReport:
    return validate_evaluation_report(read_json(path))
