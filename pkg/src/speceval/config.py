"""Tunable knobs with paper-table defaults, plus config-file loading.

Thresholds, weights, and pattern tables are configuration so projects can
pin them in a `speceval.toml`; command-line flags override file values.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import SchemaError
from .model import read_json

TIER_NAMES = ("T1_IOU30", "T2_IOU10", "T3_CENTER150", "T4_CENTER600", "T5_TEXT", "MISS")

DEFAULT_TIER_SCORES = {
    "T1_IOU30": 1.00,
    "T2_IOU10": 0.60,
    "T3_CENTER150": 0.30,
    "T4_CENTER600": 0.15,
    "T5_TEXT": 0.10,
    "MISS": 0.00,
}


@dataclass(frozen=True)
class TierConfig:
    iou_t1: float = 0.30
    iou_t2: float = 0.10
    center_t3: float = 150.0
    center_t4: float = 600.0
    text_t5: float = 0.5
    scores: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TIER_SCORES))


@dataclass(frozen=True)
class ResolverConfig:
    weight_anchor: float = 0.4
    weight_heading: float = 0.3
    weight_count: float = 0.2
    weight_url: float = 0.1
    route_bonus: float = 0.2
    floor: float = 0.15


@dataclass(frozen=True)
class AlignmentConfig:
    scale_min: float = 0.2
    scale_max: float = 5.0
    trim_factor: float = 3.0
    anchor_similarity_min: float = 0.5


@dataclass(frozen=True)
class BehaviorProfile:
    """Verdict table: what each kind of probe evidence is worth."""

    navigation_url_change: float = 1.0
    navigation_content_change: float = 0.5
    content_change_min_ratio: float = 0.20
    input_with_events: float = 1.0
    input_without_events: float = 0.5
    toggle_state_change: float = 1.0
    popout_overlay: float = 1.0
    external_link_offsite: float = 1.0
    click_any_effect: float = 1.0


@dataclass(frozen=True)
class VisualConfig:
    unresolved_floor: float = 0.0


@dataclass(frozen=True)
class SessionDefaults:
    viewport_width: int | None = None  # None: use the mockup width
    viewport_height: int = 800
    navigation_timeout_ms: int = 15000
    probe_timeout_ms: int = 5000
    settle_delay_ms: int = 500


# builds, tests, lint, probes, container startup
DEFAULT_VERIFY_PATTERNS = (
    "run build",
    "npm run build",
    "yarn build",
    "pnpm build",
    "next build",
    "vite build",
    "npm test",
    "yarn test",
    "pnpm test",
    "pytest",
    "vitest",
    "jest",
    "playwright",
    "cargo test",
    "cargo build",
    "cargo check",
    "go test",
    "go build",
    "make test",
    "make build",
    "tsc",
    "eslint",
    "ruff",
    "flake8",
    "mypy",
    "lint",
    "compose up",
    "docker compose",
    "docker-compose",
    "docker run",
    "curl http://localhost",
    "curl -s http://localhost",
)

READONLY_SHELL_COMMANDS = (
    "cat",
    "ls",
    "find",
    "rg",
    "grep",
    "head",
    "tail",
    "tree",
    "pwd",
    "stat",
    "wc",
    "which",
    "du",
    "file",
)

DEFAULT_FAMILY_ORDER = ("gpt_5-4", "gpt_5-5", "opus", "sonnet")


@dataclass(frozen=True)
class TraceConfig:
    verify_patterns: tuple[str, ...] = DEFAULT_VERIFY_PATTERNS
    family_order: tuple[str, ...] = DEFAULT_FAMILY_ORDER


@dataclass(frozen=True)
class ToolkitConfig:
    tiers: TierConfig = field(default_factory=TierConfig)
    resolver: ResolverConfig = field(default_factory=ResolverConfig)
    alignment: AlignmentConfig = field(default_factory=AlignmentConfig)
    behavior: BehaviorProfile = field(default_factory=BehaviorProfile)
    visual: VisualConfig = field(default_factory=VisualConfig)
    session: SessionDefaults = field(default_factory=SessionDefaults)
    traces: TraceConfig = field(default_factory=TraceConfig)


def load_tier_config(path: str | Path) -> TierConfig:
    """Read a tiers.config.json; absent keys keep their defaults."""
    doc = read_json(path)
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected an object")
    base = TierConfig()
    scores = dict(base.scores)
    scores.update({k: float(v) for k, v in doc.get("scores", {}).items() if k in scores})
    kwargs: dict[str, Any] = {"scores": scores}
    for name in ("iou_t1", "iou_t2", "center_t3", "center_t4", "text_t5"):
        if name in doc:
            kwargs[name] = float(doc[name])
    return replace(base, **kwargs)


def load_behavior_profile(path: str | Path) -> BehaviorProfile:
    doc = read_json(path)
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected an object")
    valid = {f.name for f in fields(BehaviorProfile)}
    unknown = set(doc) - valid
    if unknown:
        raise SchemaError(f"{path}: unknown profile keys {sorted(unknown)}")
    return replace(BehaviorProfile(), **{k: float(v) for k, v in doc.items()})


def _apply_section(obj, section: dict[str, Any], where: str):
    valid = {f.name for f in fields(obj)}
    unknown = set(section) - valid
    if unknown:
        raise SchemaError(f"{where}: unknown keys {sorted(unknown)}")
    coerced = {}
    for k, v in section.items():
        cur = getattr(obj, k)
        if isinstance(cur, tuple):
            coerced[k] = tuple(v)
        elif isinstance(cur, dict):
            merged = dict(cur)
            merged.update(v)
            coerced[k] = merged
        else:
            coerced[k] = type(cur)(v) if cur is not None else v
    return replace(obj, **coerced)


def load_toolkit_config(path: str | Path | None) -> ToolkitConfig:
    """Build the full config from an optional speceval.toml."""
    cfg = ToolkitConfig()
    if path is None:
        return cfg
    p = Path(path)
    if not p.exists():
        raise SchemaError(f"config file not found: {p}")
    with open(p, "rb") as fh:
        try:
            doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as e:
            raise SchemaError(f"{p}: bad TOML ({e})") from e
    section_fields = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    updates = {}
    for name, obj in section_fields.items():
        if name in doc:
            if not isinstance(doc[name], dict):
                raise SchemaError(f"{p}: section [{name}] must be a table")
            updates[name] = _apply_section(obj, doc[name], f"{p} [{name}]")
    unknown = set(doc) - set(section_fields)
    if unknown:
        raise SchemaError(f"{p}: unknown sections {sorted(unknown)}")
    return replace(cfg, **updates)
