"""Adapters from raw harness logs to normalized RunTraces.

Two dialects are supported, reflecting how the two harness styles log file
mutations:

* ``per_file_tools`` — every mutation is its own tool call. Events look like
  ``{"ts": 3.2, "tool": "Edit", "path": "src/a.ts", "old_bytes": 40,
  "new_bytes": 55}``; shell commands are ``{"tool": "Bash", "command": ...}``.
  A ``MultiEdit`` carries ``"edits": [{"old_bytes":..., "new_bytes":...}]``
  against one path.

* ``batched_mutations`` — one ``file_change`` event commits a batch:
  ``{"ts": 5.0, "kind": "file_change", "files": [{"path": ..., "op":
  "write"|"edit"|"delete", "old_bytes":..., "new_bytes":...}]}``; shell
  commands are ``{"kind": "command", "command": ...}``.

Both carry a shared header (run_id, model, condition, task, score, optional
inline scaffold_manifest). File sizes are tracked through a running ledger
seeded from the scaffold manifest, so first touches of template files start
from their baseline size instead of zero.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path
from typing import Any

from ..config import READONLY_SHELL_COMMANDS, DEFAULT_VERIFY_PATTERNS
from ..errors import MalformedEvent, SchemaError, UnknownDialect
from ..model import (
    MutationAction,
    RunTrace,
    TraceEvent,
    normalize_mutation,
    read_json,
    validate_run_trace,
)

DIALECTS = ("batched_mutations", "per_file_tools")

INSPECT_TOOLS = {"read", "grep", "glob", "ls", "notebookread"}
SEARCH_TOOLS = {"websearch", "toolsearch", "search", "webfetch"}
MUTATION_TOOLS = {"write": "Write", "edit": "Edit", "delete": "Delete"}
SHELL_TOOLS = {"bash", "shell", "exec"}


def classify_command(command: str, verify_patterns: tuple[str, ...]) -> str:
    """verify / inspect / other for a shell command (failure handled upstream)."""
    lowered = " ".join(command.lower().split())
    for pattern in verify_patterns:
        if pattern in lowered:
            return "verify"
    first = lowered.split(" ", 1)[0] if lowered else ""
    if first in READONLY_SHELL_COMMANDS:
        return "inspect"
    return "other"


class _Ledger:
    """Running file-size ledger seeded from scaffold baselines."""

    def __init__(self, scaffold: dict[str, int]):
        self.sizes = dict(scaffold)

    def mutate(self, kind: str, path: str, old: int, new: int, ts: float) -> MutationAction:
        before = self.sizes.get(path, 0)
        m = normalize_mutation(kind, path, before, old_bytes=old, new_bytes=new, timestamp=ts)
        self.sizes[path] = m.after_bytes
        return m


def _event_ts(raw: dict, index: int, last: float | None) -> float | None:
    ts = raw.get("ts", raw.get("timestamp"))
    if ts is None:
        return None
    if not isinstance(ts, (int, float)) or isinstance(ts, bool):
        raise MalformedEvent(f"bad timestamp {ts!r}", index)
    ts = float(ts)
    if last is not None and ts < last:
        raise MalformedEvent(f"timestamp {ts} goes backwards (previous {last})", index)
    return ts


def _int_field(raw: dict, key: str, index: int, default: int | None = None) -> int:
    v = raw.get(key, default)
    if v is None:
        raise MalformedEvent(f"missing {key!r}", index)
    if not isinstance(v, int) or isinstance(v, bool):
        raise MalformedEvent(f"{key} must be an integer, got {v!r}", index)
    return v


def _parse_per_file(
    events_raw: list, ledger: _Ledger, verify_patterns: tuple[str, ...]
) -> tuple[list[TraceEvent], list[MutationAction]]:
    events: list[TraceEvent] = []
    mutations: list[MutationAction] = []
    last_ts: float | None = None
    for i, raw in enumerate(events_raw):
        if not isinstance(raw, dict):
            raise MalformedEvent("expected an object", i)
        ts = _event_ts(raw, i, last_ts)
        if ts is not None:
            last_ts = ts
        tool = raw.get("tool")
        if not isinstance(tool, str) or not tool:
            raise MalformedEvent("missing 'tool'", i)
        failed = bool(raw.get("failed", False))
        key = tool.lower()
        search = key in SEARCH_TOOLS
        command = raw.get("command")
        mutation_ts = ts if ts is not None else float(i)

        if key in MUTATION_TOOLS or key == "multiedit":
            path = raw.get("path")
            if not isinstance(path, str) or not path:
                raise MalformedEvent(f"{tool} needs a 'path'", i)
            category = "failure" if failed else "write"
            if not failed:
                if key == "multiedit":
                    spans = raw.get("edits")
                    if not isinstance(spans, list) or not spans:
                        raise MalformedEvent("MultiEdit needs a nonempty 'edits' list", i)
                    for span in spans:
                        if not isinstance(span, dict):
                            raise MalformedEvent("MultiEdit edits must be objects", i)
                        mutations.append(
                            ledger.mutate(
                                "Edit",
                                path,
                                int(span.get("old_bytes", 0)),
                                int(span.get("new_bytes", 0)),
                                mutation_ts,
                            )
                        )
                elif key == "edit":
                    mutations.append(
                        ledger.mutate(
                            "Edit",
                            path,
                            _int_field(raw, "old_bytes", i),
                            _int_field(raw, "new_bytes", i),
                            mutation_ts,
                        )
                    )
                elif key == "write":
                    mutations.append(
                        ledger.mutate("Write", path, 0, _int_field(raw, "new_bytes", i), mutation_ts)
                    )
                else:
                    mutations.append(ledger.mutate("Delete", path, 0, 0, mutation_ts))
            events.append(
                TraceEvent(
                    timestamp=ts,
                    category=category,
                    files_touched=1,
                    raw_kind=f"tool:{tool}",
                    command_text=None,
                )
            )
            continue

        if failed:
            category = "failure"
        elif key in INSPECT_TOOLS or search:
            category = "inspect"
        elif key in SHELL_TOOLS:
            if not isinstance(command, str):
                raise MalformedEvent(f"{tool} needs a 'command'", i)
            category = classify_command(command, verify_patterns)
        else:
            category = "other"
        events.append(
            TraceEvent(
                timestamp=ts,
                category=category,
                search_flag=search,
                raw_kind=f"tool:{tool}",
                command_text=command if isinstance(command, str) else None,
            )
        )
    return events, mutations


_BATCH_OPS = {"write": "Write", "edit": "Edit", "delete": "Delete"}


def _parse_batched(
    events_raw: list, ledger: _Ledger, verify_patterns: tuple[str, ...]
) -> tuple[list[TraceEvent], list[MutationAction]]:
    events: list[TraceEvent] = []
    mutations: list[MutationAction] = []
    last_ts: float | None = None
    for i, raw in enumerate(events_raw):
        if not isinstance(raw, dict):
            raise MalformedEvent("expected an object", i)
        ts = _event_ts(raw, i, last_ts)
        if ts is not None:
            last_ts = ts
        kind = raw.get("kind")
        if not isinstance(kind, str) or not kind:
            raise MalformedEvent("missing 'kind'", i)
        failed = bool(raw.get("failed", False))
        mutation_ts = ts if ts is not None else float(i)

        if kind == "file_change":
            files = raw.get("files")
            if not isinstance(files, list) or not files:
                raise MalformedEvent("file_change needs a nonempty 'files' list", i)
            if not failed:
                for f in files:
                    if not isinstance(f, dict):
                        raise MalformedEvent("file entries must be objects", i)
                    op = f.get("op")
                    if op not in _BATCH_OPS:
                        raise MalformedEvent(f"unknown file op {op!r}", i)
                    path = f.get("path")
                    if not isinstance(path, str) or not path:
                        raise MalformedEvent("file entry needs a 'path'", i)
                    mutations.append(
                        ledger.mutate(
                            _BATCH_OPS[op],
                            path,
                            int(f.get("old_bytes", 0)),
                            int(f.get("new_bytes", 0)),
                            mutation_ts,
                        )
                    )
            events.append(
                TraceEvent(
                    timestamp=ts,
                    category="failure" if failed else "write",
                    files_touched=len(files),
                    raw_kind="file_change",
                )
            )
        elif kind == "command":
            command = raw.get("command")
            if not isinstance(command, str):
                raise MalformedEvent("command event needs 'command'", i)
            category = "failure" if failed else classify_command(command, verify_patterns)
            events.append(
                TraceEvent(timestamp=ts, category=category, raw_kind="command", command_text=command)
            )
        elif kind == "search":
            events.append(
                TraceEvent(
                    timestamp=ts,
                    category="failure" if failed else "inspect",
                    search_flag=True,
                    raw_kind="search",
                )
            )
        elif kind == "read":
            events.append(
                TraceEvent(timestamp=ts, category="failure" if failed else "inspect", raw_kind="read")
            )
        else:
            events.append(
                TraceEvent(timestamp=ts, category="failure" if failed else "other", raw_kind=kind)
            )
    return events, mutations


def parse_trace(
    source: str | Path | dict,
    dialect: str | None = None,
    scaffold_manifest: dict[str, int] | None = None,
    verify_patterns: tuple[str, ...] = DEFAULT_VERIFY_PATTERNS,
) -> RunTrace:
    """Parse one raw harness log into a normalized RunTrace."""
    doc: Any = read_json(source) if isinstance(source, (str, Path)) else source
    if not isinstance(doc, dict):
        raise SchemaError("trace log: expected a JSON object")
    dialect = dialect or doc.get("dialect")
    if dialect not in DIALECTS:
        raise UnknownDialect(
            f"unknown trace dialect {dialect!r}; expected one of {list(DIALECTS)}"
        )
    events_raw = doc.get("events")
    if not isinstance(events_raw, list):
        raise SchemaError("trace log: missing 'events' list")

    scaffold = dict(doc.get("scaffold_manifest") or {})
    scaffold.update(scaffold_manifest or {})
    scaffold = {str(k): int(v) for k, v in scaffold.items()}
    ledger = _Ledger(scaffold)

    if dialect == "per_file_tools":
        events, mutations = _parse_per_file(events_raw, ledger, verify_patterns)
    else:
        events, mutations = _parse_batched(events_raw, ledger, verify_patterns)

    run_id = doc.get("run_id")
    if not isinstance(run_id, str) or not run_id:
        raise SchemaError("trace log: missing 'run_id'")
    score = doc.get("score")
    return RunTrace(
        run_id=run_id,
        model_label=str(doc.get("model", doc.get("model_label", ""))),
        condition_label=str(doc.get("condition", doc.get("condition_label", ""))),
        task_label=str(doc.get("task", doc.get("task_label", ""))),
        events=tuple(events),
        mutations=tuple(mutations),
        scaffold_manifest=scaffold,
        score=float(score) if score is not None else None,
    )


def load_any_trace(
    path: str | Path,
    dialect: str | None = None,
    scaffold_manifest: dict[str, int] | None = None,
    verify_patterns: tuple[str, ...] = DEFAULT_VERIFY_PATTERNS,
) -> RunTrace:
    """Load a trace file, accepting raw dialect logs or normalized traces."""
    doc = read_json(path)
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected a JSON object")
    if dialect is None and "dialect" not in doc:
        if "events" in doc and all(
            isinstance(e, dict) and "category" in e for e in doc.get("events", [])
        ):
            trace = validate_run_trace(doc)
            if scaffold_manifest:
                # normalized traces already have baselines baked into
                # before_bytes; the manifest is carried as metadata only
                merged = dict(trace.scaffold_manifest)
                merged.update(scaffold_manifest)
                trace = replace(trace, scaffold_manifest=merged)
            return trace
        raise UnknownDialect(f"{path}: no dialect given and not a normalized trace")
    return parse_trace(doc, dialect, scaffold_manifest, verify_patterns)
