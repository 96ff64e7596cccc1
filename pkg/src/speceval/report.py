"""Aggregation into the structure-function score and report emission.

The headline score is S = (1/N) * sum(L_i * B_i); localization and
behavior means are reported separately since they diagnose different
failures. Reports are byte-stable given identical inputs and a pinned
timestamp.
"""

from __future__ import annotations

import io
import statistics
from pathlib import Path

from PIL import Image, ImageDraw

from .alignment import AffineTransform2D, transform_box
from .behavior import BehaviorResult
from .errors import EmptyAnnotationSet
from .localization import LocalizationResult
from .model import (
    AnnotationRow,
    BoundingBox,
    EvaluationReport,
    PageAnnotation,
    PageRow,
    ReportAggregate,
    canonical_json,
)

TIER_COLORS = {
    "T1_IOU30": "#2e7d32",
    "T2_IOU10": "#9ccc65",
    "T3_CENTER150": "#fbc02d",
    "T4_CENTER600": "#fb8c00",
    "T5_TEXT": "#8e24aa",
    "MISS": "#e53935",
}
MATCHED_COLOR = "#1e88e5"


def aggregate(locs: list[LocalizationResult], behs: list[BehaviorResult]) -> ReportAggregate:
    """Combine per-target localization and behavior into S / mean_L / mean_B."""
    if not locs:
        raise EmptyAnnotationSet("no annotations to aggregate")
    by_id = {b.target_id: b for b in behs}
    if set(by_id) != {l.target_id for l in locs}:
        raise ValueError("localization and behavior results must cover the same targets")
    n = len(locs)
    s = sum(l.L * by_id[l.target_id].B for l in locs) / n
    return ReportAggregate(
        S=s,
        mean_L=sum(l.L for l in locs) / n,
        mean_B=sum(b.B for b in behs) / n,
        N=n,
    )


def page_row(
    page_id: str,
    resolved_url: str | None,
    locs: list[LocalizationResult],
    behs: list[BehaviorResult],
) -> PageRow:
    if not locs:
        return PageRow(page_id=page_id, resolved_url=resolved_url, mean_L=0.0, mean_B=0.0, S_page=0.0)
    agg = aggregate(locs, behs)
    return PageRow(
        page_id=page_id,
        resolved_url=resolved_url,
        mean_L=agg.mean_L,
        mean_B=agg.mean_B,
        S_page=agg.S,
    )


def render_overlay(
    screenshot_png: bytes,
    transform: AffineTransform2D,
    page: PageAnnotation,
    locs: list[LocalizationResult],
    candidate_boxes: dict[str, BoundingBox],
) -> bytes:
    """Draw transformed target boxes (tier-colored) and matched candidate
    boxes over a page screenshot."""
    image = Image.open(io.BytesIO(screenshot_png)).convert("RGB")
    draw = ImageDraw.Draw(image)
    boxes = {t.id: t.box for t in page.targets}
    for loc in locs:
        mockup_box = boxes.get(loc.target_id)
        if mockup_box is None:
            continue
        b = transform_box(transform, mockup_box)
        color = TIER_COLORS.get(loc.tier, "#000000")
        draw.rectangle([b.x, b.y, b.x + b.width, b.y + b.height], outline=color, width=3)
        draw.text((b.x + 2, max(0, b.y - 12)), f"{loc.target_id} {loc.tier}", fill=color)
        if loc.matched and loc.matched in candidate_boxes:
            c = candidate_boxes[loc.matched]
            draw.rectangle(
                [c.x, c.y, c.x + c.width, c.y + c.height], outline=MATCHED_COLOR, width=1
            )
    out = io.BytesIO()
    image.save(out, format="PNG")
    return out.getvalue()


def render_text_report(report: EvaluationReport) -> str:
    lines = [
        f"Task: {report.task_name}",
        f"Generated: {report.generated_at}",
        "",
        f"S (structure-function) = {report.aggregate.S:.4f}",
        f"mean L = {report.aggregate.mean_L:.4f}",
        f"mean B = {report.aggregate.mean_B:.4f}",
        f"N = {report.aggregate.N}",
        "",
        "Per page:",
    ]
    for p in report.per_page:
        url = p.resolved_url or "(unresolved)"
        lines.append(
            f"  {p.page_id}: S={p.S_page:.4f} L={p.mean_L:.4f} B={p.mean_B:.4f}  {url}"
        )
    lines.append("")
    lines.append("Per annotation:")
    for r in report.per_annotation:
        matched = r.matched_locator or "-"
        lines.append(
            f"  {r.target_id}: {r.tier_name} L={r.L:.2f} B={r.B:.2f} matched={matched}"
            + (f"  [{r.diagnostics}]" if r.diagnostics else "")
        )
    if report.notes:
        lines.append("")
        lines.append("Notes:")
        lines.extend(f"  - {n}" for n in report.notes)
    return "\n".join(lines) + "\n"


def emit_report(
    report: EvaluationReport,
    out_dir: str | Path,
    overlays: dict[str, bytes] | None = None,
) -> dict[str, Path]:
    """Write evaluation.report.json, report.txt, and overlay images."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    json_path = out / "evaluation.report.json"
    json_path.write_text(canonical_json(report.to_dict()), encoding="utf-8")
    paths["report"] = json_path
    text_path = out / "report.txt"
    text_path.write_text(render_text_report(report), encoding="utf-8")
    paths["text"] = text_path
    for page_id, png in (overlays or {}).items():
        overlay_dir = out / "overlays"
        overlay_dir.mkdir(exist_ok=True)
        p = overlay_dir / f"{page_id}.png"
        p.write_bytes(png)
        paths[f"overlay:{page_id}"] = p
    return paths


def summarize_reports(reports: list[EvaluationReport]) -> dict:
    """Cross-run rollup; the Combined median comes from here."""
    if not reports:
        raise EmptyAnnotationSet("no reports to summarize")
    scores = [r.aggregate.S for r in reports]
    return {
        "runs": len(reports),
        "mean_S": sum(scores) / len(scores),
        "median_S": statistics.median(scores),
        "mean_L": sum(r.aggregate.mean_L for r in reports) / len(reports),
        "mean_B": sum(r.aggregate.mean_B for r in reports) / len(reports),
    }


def build_report(
    task_name: str,
    generated_at: str,
    rows: list[AnnotationRow],
    pages: list[PageRow],
    overlay_refs: list[str],
    notes: list[str],
) -> EvaluationReport:
    if not rows:
        raise EmptyAnnotationSet("task has no annotated targets")
    n = len(rows)
    agg = ReportAggregate(
        S=sum(r.L * r.B for r in rows) / n,
        mean_L=sum(r.L for r in rows) / n,
        mean_B=sum(r.B for r in rows) / n,
        N=n,
    )
    return EvaluationReport(
        task_name=task_name,
        generated_at=generated_at,
        per_annotation=tuple(rows),
        per_page=tuple(pages),
        aggregate=agg,
        overlay_refs=tuple(overlay_refs),
        notes=tuple(notes),
    )
