"""FastAPI service wrapping the core package.

Every heavy operation the CLI exposes goes through here, so the same
surface serves the thin CLI client (in-process transport), remote callers,
and the annotation UI. Paths in request bodies are resolved on the service
host's filesystem.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import replace
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from .. import __version__
from ..browser.session import SessionConfig, open_session
from ..config import (
    ToolkitConfig,
    load_behavior_profile,
    load_tier_config,
    load_toolkit_config,
)
from ..errors import (
    DegenerateVariance,
    EmptyMutationStream,
    EmptyPairSet,
    EndpointUnreachable,
    InvariantError,
    MalformedEvent,
    NavigationTimeout,
    PageCrashed,
    ProtocolVersionMismatch,
    ProviderUnavailable,
    SchemaError,
    SpecevalError,
    UnknownDialect,
)
from ..model import (
    Size,
    canonical_json,
    load_scaffold_manifest,
    load_task_annotation,
    read_json,
    validate_task_annotation,
)
from ..pipeline import EvaluateOptions, LiveBackend, evaluate_task, open_snapshot_backend
from ..report import emit_report
from ..traces import (
    build_raster,
    compute_diff_score,
    compute_trajectory,
    correlate,
    load_any_trace,
    render_raster_svg,
)
from ..traces.tables import diffscore_table, trajectory_tables
from ..visual import EmbeddingProvider, page_similarity
from . import schemas

USAGE_ERRORS = (SchemaError, InvariantError, UnknownDialect, MalformedEvent,
                EmptyMutationStream, EmptyPairSet, ValueError)
ENVIRONMENT_ERRORS = (EndpointUnreachable, ProtocolVersionMismatch, ProviderUnavailable,
                      NavigationTimeout, PageCrashed)

_DIFF_MEAN_KEYS = ("surgical", "strict", "A", "B_comp", "C", "median_edit_ratio",
                   "rewrite_share")


def _error_response(exc: Exception, status: int) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"error": type(exc).__name__, "message": str(exc)},
    )


def _load_config(path: str | None) -> ToolkitConfig:
    return load_toolkit_config(path)


def _load_traces(req_paths, dialect, scaffold_path, config):
    scaffold = load_scaffold_manifest(scaffold_path) if scaffold_path else None
    traces, errors = [], []
    for path in req_paths:
        try:
            traces.append(
                load_any_trace(path, dialect, scaffold, config.traces.verify_patterns)
            )
        except SpecevalError as e:
            errors.append(schemas.ErrorPayload(error=type(e).__name__, message=f"{path}: {e}"))
    return traces, errors


def create_app(task_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="speceval service", version=__version__)
    state = {"task_dir": Path(task_dir) if task_dir else None}
    save_lock = threading.Lock()  # writes to the task file are serialized

    @app.exception_handler(SpecevalError)
    async def _handle_speceval(request: Request, exc: SpecevalError):
        if isinstance(exc, ENVIRONMENT_ERRORS):
            return _error_response(exc, 503)
        if isinstance(exc, USAGE_ERRORS):
            return _error_response(exc, 422)
        return _error_response(exc, 500)

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/api/validate-annotation", response_model=schemas.ValidateResponse)
    def validate_annotation(req: schemas.ValidateRequest):
        task = validate_task_annotation(req.document)
        return schemas.ValidateResponse(valid=True, task_name=task.task_name)

    # -- evaluation --

    @app.post("/api/evaluate", response_model=schemas.EvaluateResponse)
    def evaluate(req: schemas.EvaluateRequest):
        if not req.snapshots_dir and not req.app_url:
            raise SchemaError("either snapshots_dir or app_url is required")
        config = _load_config(req.config_path)
        if req.tiers_path:
            config = replace(config, tiers=load_tier_config(req.tiers_path))
        if req.behavior_profile_path:
            config = replace(config, behavior=load_behavior_profile(req.behavior_profile_path))
        task = load_task_annotation(req.annotations_path)

        declared = {}
        if req.declared_path:
            doc = read_json(req.declared_path)
            declared = {str(k): str(v) for k, v in doc.items()} if isinstance(doc, dict) else {}
        routes: tuple[str, ...] = ()
        if req.routes_path:
            routes = tuple(
                line.strip()
                for line in Path(req.routes_path).read_text(encoding="utf-8").splitlines()
                if line.strip()
            )
        curated = read_json(req.curated_path) if req.curated_path else {}

        options = EvaluateOptions(
            root_url=req.app_url,
            declared=declared,
            route_patterns=routes,
            curated_anchors=curated if isinstance(curated, dict) else {},
            max_pages=req.max_pages,
            jobs=req.jobs,
            timestamp=req.timestamp,
            overlays=req.overlays,
            config=config,
        )

        session = None
        try:
            if req.snapshots_dir:
                backend = open_snapshot_backend(req.snapshots_dir)
            else:
                width = req.viewport_width or config.session.viewport_width or int(
                    task.pages[0].mockup_size.width
                )
                height = req.viewport_height or config.session.viewport_height
                session = open_session(
                    SessionConfig(
                        endpoint_url=req.browser_endpoint or "",
                        viewport=Size(width, height),
                        navigation_timeout_ms=config.session.navigation_timeout_ms,
                        probe_timeout_ms=config.session.probe_timeout_ms,
                        settle_delay_ms=config.session.settle_delay_ms,
                    )
                )
                backend = LiveBackend(session)
            report, overlays, warnings = evaluate_task(task, backend, options)
        finally:
            if session is not None:
                session.close()

        paths = emit_report(report, req.out_dir, overlays)
        return schemas.EvaluateResponse(
            report=report.to_dict(),
            warnings=warnings,
            files={k: str(v) for k, v in paths.items()},
        )

    # -- trace analytics --

    @app.post("/api/diffscore", response_model=schemas.DiffscoreResponse)
    def diffscore(req: schemas.DiffscoreRequest):
        config = _load_config(req.config_path)
        traces, errors = _load_traces(req.trace_paths, req.dialect, req.scaffold_path, config)
        runs = []
        results = []
        for trace in traces:
            try:
                result = compute_diff_score(trace)
            except EmptyMutationStream as e:
                errors.append(schemas.ErrorPayload(error=type(e).__name__, message=str(e)))
                continue
            results.append((trace, result))
            runs.append(
                schemas.RunDiffRow(
                    run_id=trace.run_id,
                    model_label=trace.model_label,
                    condition_label=trace.condition_label,
                    task_label=trace.task_label,
                    score=trace.score,
                    result=result.to_dict(),
                )
            )

        groups = []
        if req.group_by in ("model", "condition"):
            key_of = (lambda t: t.model_label) if req.group_by == "model" else (
                lambda t: t.condition_label
            )
            grouped: dict[str, list] = {}
            for trace, result in results:
                grouped.setdefault(key_of(trace), []).append((trace, result))
            for key in sorted(grouped):
                members = grouped[key]
                mean = {
                    k: sum(getattr(r, k) for _, r in members) / len(members)
                    for k in _DIFF_MEAN_KEYS
                }
                scored = [t.score for t, _ in members if t.score is not None]
                groups.append(
                    schemas.GroupDiffRow(
                        key=key,
                        n=len(members),
                        mean=mean,
                        mean_score=sum(scored) / len(scored) if scored else None,
                    )
                )

        correlation = None
        scored = [(r.surgical, r.strict, t.score) for t, r in results if t.score is not None]
        if len(scored) >= 2:
            try:
                correlation = {
                    "surgical_vs_score": correlate([s for s, _, _ in scored],
                                                   [sc for _, _, sc in scored]),
                    "strict_vs_score": correlate([st for _, st, _ in scored],
                                                 [sc for _, _, sc in scored]),
                }
            except DegenerateVariance:
                correlation = None

        table = diffscore_table([(t.run_id, r) for t, r in results])
        files = {}
        if req.out_dir:
            out = Path(req.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            payload = {
                "format_version": 1,
                "runs": [r.model_dump() for r in runs],
                "groups": [g.model_dump() for g in groups],
                "correlation": correlation,
            }
            (out / "diffscore.json").write_text(canonical_json(payload), encoding="utf-8")
            (out / "diffscore.txt").write_text(table + "\n", encoding="utf-8")
            files = {"json": str(out / "diffscore.json"), "table": str(out / "diffscore.txt")}
        return schemas.DiffscoreResponse(
            runs=runs, groups=groups, correlation=correlation, errors=errors,
            table=table, files=files,
        )

    @app.post("/api/trajectory", response_model=schemas.TrajectoryResponse)
    def trajectory(req: schemas.TrajectoryRequest):
        config = _load_config(req.config_path)
        traces, errors = _load_traces(req.trace_paths, req.dialect, req.scaffold_path, config)
        summaries = compute_trajectory(traces) if traces else {}
        tables = "\n\n".join(
            trajectory_tables(label, summary) for label, summary in summaries.items()
        )
        raster_rows = None
        files = {}
        if req.raster_out and traces:
            rows = build_raster(traces, config.traces.family_order)
            render_raster_svg(rows, req.raster_out)
            raster_rows = len(rows)
            files["raster"] = req.raster_out
        if req.out_dir:
            out = Path(req.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            payload = {
                "format_version": 1,
                "models": {k: v.to_dict() for k, v in summaries.items()},
            }
            (out / "trajectory.json").write_text(canonical_json(payload), encoding="utf-8")
            (out / "trajectory.txt").write_text(tables + "\n", encoding="utf-8")
            files.update(
                {"json": str(out / "trajectory.json"), "table": str(out / "trajectory.txt")}
            )
        return schemas.TrajectoryResponse(
            models={k: v.to_dict() for k, v in summaries.items()},
            errors=errors,
            tables=tables,
            raster_rows=raster_rows,
            files=files,
        )

    # -- visual similarity --

    @app.post("/api/visual", response_model=schemas.VisualResponse)
    def visual(req: schemas.VisualRequest):
        task = load_task_annotation(req.annotations_path)
        provider = EmbeddingProvider(req.cache_dir, endpoint=req.endpoint)
        base = Path(req.annotations_path).parent
        shots = Path(req.screenshots_dir)
        rows = []
        values = []
        for page in task.pages:
            mockup_path = base / page.mockup_image
            shot_path = shots / f"{page.page_id}.png"
            if not mockup_path.exists() or not shot_path.exists():
                rows.append(
                    schemas.VisualPageRow(page_id=page.page_id, similarity=None, floored=True)
                )
                values.append(req.unresolved_floor)
                continue
            sim = page_similarity(
                provider.embed(mockup_path.read_bytes()),
                provider.embed(shot_path.read_bytes()),
            )
            rows.append(schemas.VisualPageRow(page_id=page.page_id, similarity=sim, floored=False))
            values.append(sim)
        if not values:
            raise EmptyPairSet("annotation has no pages")
        return schemas.VisualResponse(per_page=rows, mean=sum(values) / len(values))

    # -- annotation service (enabled with a task directory) --

    def _task_dir() -> Path:
        d = state["task_dir"]
        if d is None:
            raise SchemaError("annotation service not configured with a task directory")
        return d

    def _annotation_path() -> Path:
        return _task_dir() / "task.annotation.json"

    def _revision(path: Path) -> str:
        if not path.exists():
            return "new"
        return hashlib.sha256(path.read_bytes()).hexdigest()[:16]

    @app.get("/api/annotation/pages", response_model=list[schemas.PageInfo])
    def annotation_pages():
        root = _task_dir()
        pages: dict[str, schemas.PageInfo] = {}
        path = _annotation_path()
        if path.exists():
            task = load_task_annotation(path)
            for p in task.pages:
                pages[p.page_id] = schemas.PageInfo(
                    page_id=p.page_id, mockup_image=p.mockup_image, annotated=True
                )
        mockups = root / "mockups"
        if mockups.is_dir():
            for img in sorted(mockups.glob("*.png")):
                pid = img.stem
                if pid not in pages:
                    pages[pid] = schemas.PageInfo(
                        page_id=pid, mockup_image=f"mockups/{img.name}", annotated=False
                    )
        return sorted(pages.values(), key=lambda p: p.page_id)

    @app.get("/api/annotation/document")
    def annotation_document():
        path = _annotation_path()
        if not path.exists():
            return {"document": None, "revision": "new"}
        return {"document": read_json(path), "revision": _revision(path)}

    @app.put("/api/annotation/document", response_model=schemas.SaveResponse)
    def annotation_save(body: schemas.AnnotationDocument):
        path = _annotation_path()
        with save_lock:
            current = _revision(path)
            if body.revision != current:
                return JSONResponse(
                    status_code=409,
                    content={
                        "error": "RevisionConflict",
                        "message": f"file is at revision {current}, save sent {body.revision}",
                    },
                )
            task = validate_task_annotation(body.document)  # 422 on violation, nothing persisted
            path.write_text(canonical_json(task.to_dict()), encoding="utf-8")
            return schemas.SaveResponse(revision=_revision(path))

    @app.get("/api/annotation/image/{page_id}")
    def annotation_image(page_id: str):
        root = _task_dir()
        for rel in (f"mockups/{page_id}.png", f"{page_id}.png"):
            p = root / rel
            if p.exists():
                return FileResponse(p)
        return _error_response(SchemaError(f"no mockup image for page {page_id!r}"), 404)

    @app.get("/api/annotation/report")
    def annotation_report():
        path = _task_dir() / "evaluation.report.json"
        if not path.exists():
            return _error_response(SchemaError("no evaluation report for this task"), 404)
        return read_json(path)

    frontend_dist = Path(__file__).resolve().parents[3] / "frontend" / "dist"
    if frontend_dist.is_dir():
        app.mount("/", StaticFiles(directory=frontend_dist, html=True), name="ui")

    return app
