"""Request/response models for the evaluation service."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, Field


class ErrorPayload(BaseModel):
    error: str
    message: str


class EvaluateRequest(BaseModel):
    annotations_path: str
    snapshots_dir: str | None = None
    app_url: str | None = None
    browser_endpoint: str | None = None
    out_dir: str
    declared_path: str | None = None
    routes_path: str | None = None
    curated_path: str | None = None
    config_path: str | None = None
    tiers_path: str | None = None
    behavior_profile_path: str | None = None
    timestamp: str = ""
    max_pages: int = Field(default=40, ge=1)
    jobs: int = Field(default=1, ge=1)
    overlays: bool = True
    viewport_width: int | None = None
    viewport_height: int | None = None


class EvaluateResponse(BaseModel):
    report: dict[str, Any]
    warnings: list[str]
    files: dict[str, str]


class DiffscoreRequest(BaseModel):
    trace_paths: list[str]
    dialect: str | None = None
    scaffold_path: str | None = None
    group_by: str | None = None  # "model" or "condition"
    out_dir: str | None = None
    config_path: str | None = None


class RunDiffRow(BaseModel):
    run_id: str
    model_label: str
    condition_label: str
    task_label: str
    score: float | None
    result: dict[str, Any]


class GroupDiffRow(BaseModel):
    key: str
    n: int
    mean: dict[str, float]
    mean_score: float | None


class DiffscoreResponse(BaseModel):
    runs: list[RunDiffRow]
    groups: list[GroupDiffRow]
    correlation: dict[str, float] | None
    errors: list[ErrorPayload]
    table: str
    files: dict[str, str] = {}


class TrajectoryRequest(BaseModel):
    trace_paths: list[str]
    dialect: str | None = None
    scaffold_path: str | None = None
    raster_out: str | None = None
    out_dir: str | None = None
    config_path: str | None = None


class TrajectoryResponse(BaseModel):
    models: dict[str, dict[str, Any]]
    errors: list[ErrorPayload]
    tables: str
    raster_rows: int | None
    files: dict[str, str] = {}


class VisualRequest(BaseModel):
    annotations_path: str
    screenshots_dir: str
    cache_dir: str
    endpoint: str | None = None
    unresolved_floor: float = 0.0


class VisualPageRow(BaseModel):
    page_id: str
    similarity: float | None
    floored: bool


class VisualResponse(BaseModel):
    per_page: list[VisualPageRow]
    mean: float


class ValidateRequest(BaseModel):
    document: dict[str, Any]


class ValidateResponse(BaseModel):
    valid: bool
    task_name: str


class AnnotationDocument(BaseModel):
    document: dict[str, Any]
    revision: str


class SaveResponse(BaseModel):
    revision: str


class PageInfo(BaseModel):
    page_id: str
    mockup_image: str
    annotated: bool
