"""Command-line entry point.

The CLI is a thin client over the FastAPI service: by default it mounts
the app in-process (no network, still one code path), or talks to a
remote service when SPECEVAL_SERVICE_ENDPOINT is set.

Exit codes are a stable CI contract: 0 success, 2 partial evaluation
(some page unresolved), 64 usage error, 69 environment error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_PARTIAL = 2
EXIT_USAGE = 64
EXIT_ENVIRONMENT = 69

SERVICE_ENV_VAR = "SPECEVAL_SERVICE_ENDPOINT"
BROWSER_ENV_VAR = "SPECEVAL_BROWSER_ENDPOINT"
EMBED_ENV_VAR = "SPECEVAL_EMBED_ENDPOINT"


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> Parser:
    parser = Parser(prog="speceval", description="Mockup-grounded web-app evaluation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evaluate", help="score a generated app against an annotation")
    ev.add_argument("annotations", help="task.annotation.json path")
    src = ev.add_mutually_exclusive_group(required=True)
    src.add_argument("--app-url", help="root URL of the running generated app")
    src.add_argument("--snapshots", help="directory of recorded *.snapshot.json files")
    ev.add_argument("--browser-endpoint", default=os.environ.get(BROWSER_ENV_VAR),
                    help=f"remote browser endpoint (or ${BROWSER_ENV_VAR})")
    ev.add_argument("--out", default="speceval-out", help="output directory")
    ev.add_argument("--declared", help="declared.mapping.json (page_id -> url)")
    ev.add_argument("--routes", help="routes.txt, one route pattern per line")
    ev.add_argument("--curated", help="curated.anchors.json")
    ev.add_argument("--config", help="speceval.toml")
    ev.add_argument("--tiers", help="tiers.config.json overriding tier thresholds/scores")
    ev.add_argument("--behavior-profile", help="behavior.profile.json verdict table")
    ev.add_argument("--timestamp", default="", help="pin the report timestamp")
    ev.add_argument("--max-pages", type=int, default=40)
    ev.add_argument("--jobs", type=int, default=1)
    ev.add_argument("--viewport", help="WxH, default: mockup width x 800")
    ev.add_argument("--no-overlays", action="store_true")

    df = sub.add_parser("diffscore", help="editing-style scores over agent traces")
    df.add_argument("traces", nargs="+", help="trace files (raw dialect or normalized)")
    df.add_argument("--dialect", choices=["batched_mutations", "per_file_tools"])
    df.add_argument("--scaffold", help="scaffold.manifest.json of template baseline sizes")
    df.add_argument("--group-by", choices=["model", "condition"])
    df.add_argument("--out", help="output directory for structured results")
    df.add_argument("--config", help="speceval.toml")

    tr = sub.add_parser("trajectory", help="workflow bins, transitions, and raster")
    tr.add_argument("traces", nargs="+")
    tr.add_argument("--dialect", choices=["batched_mutations", "per_file_tools"])
    tr.add_argument("--scaffold")
    tr.add_argument("--raster", help="write the per-run raster SVG here")
    tr.add_argument("--out", help="output directory for structured results")
    tr.add_argument("--config", help="speceval.toml")

    vi = sub.add_parser("visual", help="embedding similarity between mockups and screenshots")
    vi.add_argument("annotations")
    vi.add_argument("--screenshots", required=True, help="directory of <page_id>.png captures")
    vi.add_argument("--cache", help="embedding cache directory (default <out>/embeddings)")
    vi.add_argument("--endpoint", default=os.environ.get(EMBED_ENV_VAR),
                    help=f"embedding provider endpoint (or ${EMBED_ENV_VAR})")
    vi.add_argument("--floor", type=float, default=0.0, help="score for unresolved pages")
    vi.add_argument("--out", default="speceval-out")

    an = sub.add_parser("annotate", help="serve the annotation UI for a task directory")
    an.add_argument("task_dir", help="directory with mockups/ and task.annotation.json")
    an.add_argument("--port", type=int, default=7341)
    an.add_argument("--host", default="127.0.0.1")

    return parser


def service_client():
    """In-process ASGI client by default; remote when the env var is set."""
    endpoint = os.environ.get(SERVICE_ENV_VAR)
    if endpoint:
        import httpx

        return httpx.Client(base_url=endpoint, timeout=600.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # starlette warns about its httpx test client
        from fastapi.testclient import TestClient

    from .service import create_app

    return TestClient(create_app())


def _api_error_exit(response) -> int:
    try:
        payload = response.json()
        message = f"{payload.get('error', 'error')}: {payload.get('message', '')}"
    except ValueError:
        message = response.text
    print(f"speceval: {message}", file=sys.stderr)
    if response.status_code == 503:
        return EXIT_ENVIRONMENT
    if response.status_code in (400, 404, 409, 422):
        return EXIT_USAGE
    return 1


def cmd_evaluate(args) -> int:
    viewport_width = viewport_height = None
    if args.viewport:
        try:
            w, h = args.viewport.lower().split("x")
            viewport_width, viewport_height = int(w), int(h)
        except ValueError:
            raise UsageError(f"bad --viewport {args.viewport!r}, expected WxH") from None
    if args.app_url and not args.browser_endpoint:
        print(f"speceval: live evaluation needs --browser-endpoint or ${BROWSER_ENV_VAR}",
              file=sys.stderr)
        return EXIT_ENVIRONMENT
    body = {
        "annotations_path": args.annotations,
        "snapshots_dir": args.snapshots,
        "app_url": args.app_url,
        "browser_endpoint": args.browser_endpoint,
        "out_dir": args.out,
        "declared_path": args.declared,
        "routes_path": args.routes,
        "curated_path": args.curated,
        "config_path": args.config,
        "tiers_path": args.tiers,
        "behavior_profile_path": args.behavior_profile,
        "timestamp": args.timestamp,
        "max_pages": args.max_pages,
        "jobs": args.jobs,
        "overlays": not args.no_overlays,
        "viewport_width": viewport_width,
        "viewport_height": viewport_height,
    }
    with service_client() as client:
        response = client.post("/api/evaluate", json=body)
    if response.status_code != 200:
        return _api_error_exit(response)
    payload = response.json()
    agg = payload["report"]["aggregate"]
    print(f"S={agg['S']:.4f}  mean_L={agg['mean_L']:.4f}  mean_B={agg['mean_B']:.4f}  "
          f"N={agg['N']}")
    for page in payload["report"]["per_page"]:
        url = page["resolved_url"] or "(unresolved)"
        print(f"  {page['page_id']}: S={page['S_page']:.4f}  {url}")
    print(f"report: {payload['files']['report']}")
    if payload["warnings"]:
        for warning in payload["warnings"]:
            print(f"warning: {warning}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_diffscore(args) -> int:
    body = {
        "trace_paths": args.traces,
        "dialect": args.dialect,
        "scaffold_path": args.scaffold,
        "group_by": args.group_by,
        "out_dir": args.out,
        "config_path": args.config,
    }
    with service_client() as client:
        response = client.post("/api/diffscore", json=body)
    if response.status_code != 200:
        return _api_error_exit(response)
    payload = response.json()
    print(payload["table"])
    for group in payload["groups"]:
        mean = group["mean"]
        score = f"  combined={group['mean_score']:.3f}" if group["mean_score"] is not None else ""
        print(f"[{group['key']}] n={group['n']} surgical={mean['surgical']:.1f} "
              f"strict={mean['strict']:.1f}{score}")
    if payload["correlation"]:
        c = payload["correlation"]
        print(f"pearson surgical~score={c['surgical_vs_score']:.3f} "
              f"strict~score={c['strict_vs_score']:.3f}")
    for err in payload["errors"]:
        print(f"warning: {err['error']}: {err['message']}", file=sys.stderr)
    if not payload["runs"]:
        print("speceval: no usable traces", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def cmd_trajectory(args) -> int:
    raster_out = args.raster
    if raster_out and args.out and not Path(raster_out).is_absolute():
        raster_out = str(Path(args.out) / raster_out)
    body = {
        "trace_paths": args.traces,
        "dialect": args.dialect,
        "scaffold_path": args.scaffold,
        "raster_out": raster_out,
        "out_dir": args.out,
        "config_path": args.config,
    }
    with service_client() as client:
        response = client.post("/api/trajectory", json=body)
    if response.status_code != 200:
        return _api_error_exit(response)
    payload = response.json()
    print(payload["tables"])
    if payload["raster_rows"] is not None:
        print(f"raster: {payload['files'].get('raster')} ({payload['raster_rows']} rows)")
    for err in payload["errors"]:
        print(f"warning: {err['error']}: {err['message']}", file=sys.stderr)
    if not payload["models"]:
        print("speceval: no usable traces", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def cmd_visual(args) -> int:
    cache = args.cache or str(Path(args.out) / "embeddings")
    body = {
        "annotations_path": args.annotations,
        "screenshots_dir": args.screenshots,
        "cache_dir": cache,
        "endpoint": args.endpoint,
        "unresolved_floor": args.floor,
    }
    with service_client() as client:
        response = client.post("/api/visual", json=body)
    if response.status_code != 200:
        return _api_error_exit(response)
    payload = response.json()
    for row in payload["per_page"]:
        sim = "floored" if row["floored"] else f"{row['similarity']:.4f}"
        print(f"  {row['page_id']}: {sim}")
    print(f"mean similarity: {payload['mean']:.4f}")
    return EXIT_OK


def cmd_annotate(args) -> int:
    import uvicorn

    from .service import create_app

    task_dir = Path(args.task_dir)
    if not task_dir.is_dir():
        raise UsageError(f"task directory not found: {task_dir}")
    app = create_app(task_dir=task_dir)
    print(f"annotation service for {task_dir} on http://{args.host}:{args.port}")
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except (OSError, SystemExit) as e:
        print(f"speceval: cannot serve on port {args.port}: {e}", file=sys.stderr)
        return EXIT_ENVIRONMENT
    return EXIT_OK


COMMANDS = {
    "evaluate": cmd_evaluate,
    "diffscore": cmd_diffscore,
    "trajectory": cmd_trajectory,
    "visual": cmd_visual,
    "annotate": cmd_annotate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"speceval: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
