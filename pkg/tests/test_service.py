import json
import shutil
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from speceval.service import create_app

from helpers import make_annotation_doc

APPS = Path(__file__).parent / "fixtures" / "apps"


@pytest.fixture()
def client():
    return TestClient(create_app())


@pytest.fixture()
def task_client(tmp_path):
    task_dir = tmp_path / "task"
    (task_dir / "mockups").mkdir(parents=True)
    src = APPS / "lumen-notes" / "mockups"
    for img in src.glob("*.png"):
        shutil.copy(img, task_dir / "mockups" / img.name)
    return TestClient(create_app(task_dir=task_dir)), task_dir


class TestHealthAndValidate:
    def test_health(self, client):
        body = client.get("/api/health").json()
        assert body["status"] == "ok"

    def test_validate_ok(self, client):
        response = client.post("/api/validate-annotation",
                               json={"document": make_annotation_doc()})
        assert response.status_code == 200
        assert response.json()["valid"] is True

    def test_validate_invariant_violation_is_422(self, client):
        doc = make_annotation_doc()
        doc["pages"][0]["anchors"] = doc["pages"][0]["anchors"][:1]
        response = client.post("/api/validate-annotation", json={"document": doc})
        assert response.status_code == 422
        payload = response.json()
        assert payload["error"] == "InvariantError"
        assert "expected 2..5" in payload["message"]


class TestEvaluateEndpoint:
    def test_snapshot_evaluation(self, client, tmp_path):
        base = APPS / "petal-shop"
        response = client.post(
            "/api/evaluate",
            json={
                "annotations_path": str(base / "task.annotation.json"),
                "snapshots_dir": str(base / "snapshots"),
                "out_dir": str(tmp_path / "out"),
                "timestamp": "2026-08-01T00:00:00Z",
            },
        )
        assert response.status_code == 200
        payload = response.json()
        oracle = json.loads((base / "oracle.expected.json").read_text())
        assert payload["report"]["aggregate"]["S"] == pytest.approx(oracle["S"], abs=1e-9)
        assert Path(payload["files"]["report"]).exists()
        assert (tmp_path / "out" / "overlays" / "home.png").exists()

    def test_missing_annotation_file_is_422(self, client, tmp_path):
        response = client.post(
            "/api/evaluate",
            json={
                "annotations_path": str(tmp_path / "missing.json"),
                "snapshots_dir": str(APPS / "lumen-notes" / "snapshots"),
                "out_dir": str(tmp_path / "out"),
            },
        )
        assert response.status_code == 422
        assert response.json()["error"] == "SchemaError"

    def test_neither_source_is_422(self, client, tmp_path):
        response = client.post(
            "/api/evaluate",
            json={
                "annotations_path": str(APPS / "lumen-notes" / "task.annotation.json"),
                "out_dir": str(tmp_path / "out"),
            },
        )
        assert response.status_code == 422

    def test_unreachable_browser_is_503(self, client, tmp_path):
        response = client.post(
            "/api/evaluate",
            json={
                "annotations_path": str(APPS / "lumen-notes" / "task.annotation.json"),
                "app_url": "http://127.0.0.1:1/",
                "browser_endpoint": "http://127.0.0.1:1",
                "out_dir": str(tmp_path / "out"),
            },
        )
        assert response.status_code == 503


class TestAnalyticsEndpoints:
    def _write_trace(self, tmp_path, name="t1.json", run_id="r1", score=None):
        doc = {
            "dialect": "per_file_tools",
            "run_id": run_id,
            "model": "opus",
            "condition": "C2",
            "task": "demo",
            "score": score,
            "events": [
                {"ts": 0.0, "tool": "Read", "path": "a.py"},
                {"ts": 1.0, "tool": "Edit", "path": "a.py", "old_bytes": 10, "new_bytes": 10},
                {"ts": 2.0, "tool": "Bash", "command": "pytest -q"},
            ],
            "scaffold_manifest": {"a.py": 1000},
        }
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return p

    def test_diffscore_endpoint(self, client, tmp_path):
        p = self._write_trace(tmp_path)
        response = client.post("/api/diffscore", json={"trace_paths": [str(p)]})
        assert response.status_code == 200
        payload = response.json()
        assert len(payload["runs"]) == 1
        assert payload["runs"][0]["result"]["surgical"] == pytest.approx(99.7)
        assert "Surgical" in payload["table"]

    def test_diffscore_tolerates_corrupt_trace(self, client, tmp_path):
        good = self._write_trace(tmp_path)
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        response = client.post(
            "/api/diffscore", json={"trace_paths": [str(good), str(bad)]}
        )
        assert response.status_code == 200
        payload = response.json()
        assert len(payload["runs"]) == 1
        assert len(payload["errors"]) == 1

    def test_diffscore_group_by_model(self, client, tmp_path):
        a = self._write_trace(tmp_path, "a.json", "r1", score=0.3)
        b = self._write_trace(tmp_path, "b.json", "r2", score=0.5)
        response = client.post(
            "/api/diffscore",
            json={"trace_paths": [str(a), str(b)], "group_by": "model"},
        )
        payload = response.json()
        assert payload["groups"][0]["key"] == "opus"
        assert payload["groups"][0]["n"] == 2
        assert payload["groups"][0]["mean_score"] == pytest.approx(0.4)

    def test_trajectory_endpoint_with_raster(self, client, tmp_path):
        p = self._write_trace(tmp_path)
        raster = tmp_path / "raster.svg"
        response = client.post(
            "/api/trajectory",
            json={"trace_paths": [str(p)], "raster_out": str(raster)},
        )
        assert response.status_code == 200
        payload = response.json()
        assert "opus" in payload["models"]
        rows = payload["models"]["opus"]["transitions"]
        for i, row in enumerate(rows):
            if payload["models"]["opus"]["row_counts"][i]:
                assert sum(row) == pytest.approx(1.0, abs=1e-9)
        assert raster.exists()
        assert payload["raster_rows"] == 1


class TestVisualEndpoint:
    def test_floored_when_screenshots_missing(self, client, tmp_path):
        base = APPS / "lumen-notes"
        response = client.post(
            "/api/visual",
            json={
                "annotations_path": str(base / "task.annotation.json"),
                "screenshots_dir": str(tmp_path / "none"),
                "cache_dir": str(tmp_path / "cache"),
                "unresolved_floor": 0.25,
            },
        )
        assert response.status_code == 200
        payload = response.json()
        assert all(row["floored"] for row in payload["per_page"])
        assert payload["mean"] == pytest.approx(0.25)

    def test_identical_images_score_one_with_fake_provider(self, client, tmp_path, monkeypatch):
        import httpx as _httpx

        def fake_post(url, content=None, headers=None, timeout=None):
            digest = float(sum(content) % 997) + 1.0
            return _httpx.Response(
                200, json=[digest, 1.0],
                request=_httpx.Request("POST", url),
            )

        monkeypatch.setattr(_httpx, "post", fake_post)
        base = APPS / "lumen-notes"
        shots = tmp_path / "shots"
        shots.mkdir()
        for page in ("home", "settings"):
            shutil.copy(base / "mockups" / f"{page}.png", shots / f"{page}.png")
        response = client.post(
            "/api/visual",
            json={
                "annotations_path": str(base / "task.annotation.json"),
                "screenshots_dir": str(shots),
                "cache_dir": str(tmp_path / "cache"),
                "endpoint": "http://embed.local",
            },
        )
        assert response.status_code == 200
        assert response.json()["mean"] == pytest.approx(1.0)


class TestAnnotationService:
    def _valid_doc(self):
        doc = make_annotation_doc(task_name="lumen-notes")
        doc["pages"][0]["mockup_image"] = "mockups/home.png"
        return doc

    def test_pages_listed_from_mockups(self, task_client):
        client, _ = task_client
        pages = client.get("/api/annotation/pages").json()
        ids = {p["page_id"] for p in pages}
        assert ids == {"home", "settings"}
        assert all(not p["annotated"] for p in pages)

    def test_image_fetch(self, task_client):
        client, _ = task_client
        response = client.get("/api/annotation/image/home")
        assert response.status_code == 200
        assert response.content[:4] == b"\x89PNG"

    def test_image_404(self, task_client):
        client, _ = task_client
        assert client.get("/api/annotation/image/nope").status_code == 404

    def test_save_load_round_trip(self, task_client):
        client, task_dir = task_client
        doc = self._valid_doc()
        save = client.put(
            "/api/annotation/document", json={"document": doc, "revision": "new"}
        )
        assert save.status_code == 200
        revision = save.json()["revision"]

        loaded = client.get("/api/annotation/document").json()
        assert loaded["revision"] == revision
        assert loaded["document"]["task_name"] == "lumen-notes"

        # resave identical content: canonical serialization keeps bytes stable
        first_bytes = (task_dir / "task.annotation.json").read_bytes()
        resave = client.put(
            "/api/annotation/document",
            json={"document": loaded["document"], "revision": revision},
        )
        assert resave.status_code == 200
        assert (task_dir / "task.annotation.json").read_bytes() == first_bytes

    def test_invalid_save_rejected_and_not_persisted(self, task_client):
        client, task_dir = task_client
        doc = self._valid_doc()
        doc["pages"][0]["anchors"] = doc["pages"][0]["anchors"][:1]
        response = client.put(
            "/api/annotation/document", json={"document": doc, "revision": "new"}
        )
        assert response.status_code == 422
        assert "expected 2..5" in response.json()["message"]
        assert not (task_dir / "task.annotation.json").exists()

    def test_revision_conflict_is_409(self, task_client):
        client, _ = task_client
        doc = self._valid_doc()
        assert client.put(
            "/api/annotation/document", json={"document": doc, "revision": "new"}
        ).status_code == 200
        stale = client.put(
            "/api/annotation/document", json={"document": doc, "revision": "new"}
        )
        assert stale.status_code == 409

    def test_report_404_when_absent(self, task_client):
        client, _ = task_client
        assert client.get("/api/annotation/report").status_code == 404

    def test_unconfigured_annotation_api_is_422(self, client):
        assert client.get("/api/annotation/pages").status_code == 422

    def test_ui_served_when_built(self, task_client):
        dist = Path(__file__).parent.parent / "frontend" / "dist"
        if not (dist / "index.html").exists():
            pytest.skip("frontend not built")
        client, _ = task_client
        response = client.get("/")
        assert response.status_code == 200
        assert "speceval annotation" in response.text
