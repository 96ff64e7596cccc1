"""Builders for valid documents that individual tests then mutate."""

from __future__ import annotations

import copy


def make_annotation_doc(**overrides) -> dict:
    doc = {
        "format_version": 1,
        "task_name": "demo",
        "condition_label": None,
        "pages": [
            {
                "page_id": "home",
                "mockup_image": "mockups/home.png",
                "mockup_size": {"width": 1280, "height": 2000},
                "declared_url": None,
                "anchors": [
                    {"label": "<search>", "point": {"x": 600.0, "y": 80.0}, "page_id": "home"},
                    {"label": "<checkout>", "point": {"x": 1100.0, "y": 80.0}, "page_id": "home"},
                    {"label": "<hero>", "point": {"x": 640.0, "y": 500.0}, "page_id": "home"},
                ],
                "targets": [
                    {
                        "id": f"home.t{i}",
                        "page_id": "home",
                        "box": {"x": 100.0 + 150 * i, "y": 200.0, "width": 120.0, "height": 48.0},
                        "interaction": {"variant": variant, "subtype": None},
                        "description": desc,
                    }
                    for i, (variant, desc) in enumerate(
                        [
                            ("navigation", "Browse jobs"),
                            ("input", "Search box"),
                            ("toggle", "Dark mode"),
                            ("click", "Apply now"),
                            ("external_link", "Twitter"),
                        ]
                    )
                ],
            }
        ],
    }
    doc.update(overrides)
    return doc


def make_snapshot_doc(**overrides) -> dict:
    doc = {
        "format_version": 1,
        "url": "http://localhost:9000/",
        "viewport": {"width": 1280, "height": 800},
        "candidates": [
            {
                "locator": "#search",
                "tag_or_role": "input",
                "box": {"x": 560.0, "y": 60.0, "width": 200.0, "height": 40.0},
                "text": "",
                "attributes": {"placeholder": "Search"},
                "visible": True,
            },
            {
                "locator": "nav > a:nth-of-type(1)",
                "tag_or_role": "a",
                "box": {"x": 100.0, "y": 190.0, "width": 120.0, "height": 50.0},
                "text": "Browse jobs",
                "attributes": {"href": "/jobs"},
                "visible": True,
            },
        ],
        "internal_links": ["http://localhost:9000/jobs"],
        "headings": ["Job Board"],
        "body_digest": "job board browse jobs search checkout hero",
        "screenshot": None,
        "captured_at": "2026-08-01T00:00:00Z",
    }
    doc.update(overrides)
    return doc


def clone(doc: dict) -> dict:
    return copy.deepcopy(doc)
