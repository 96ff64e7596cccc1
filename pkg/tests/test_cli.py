import json
from pathlib import Path

import pytest

from speceval.cli import EXIT_ENVIRONMENT, EXIT_OK, EXIT_PARTIAL, EXIT_USAGE, main

APPS = Path(__file__).parent / "fixtures" / "apps"


def fixture_args(name, out, extra=()):
    base = APPS / name
    return [
        "evaluate",
        str(base / "task.annotation.json"),
        "--snapshots", str(base / "snapshots"),
        "--out", str(out),
        "--timestamp", "2026-08-01T00:00:00Z",
        *extra,
    ]


def write_trace(tmp_path, name="t.json", **overrides):
    doc = {
        "dialect": "batched_mutations",
        "run_id": "r1",
        "model": "gpt_5-4",
        "condition": "C1-pickA",
        "task": "demo",
        "score": 0.3,
        "events": [
            {"ts": 0.0, "kind": "command", "command": "ls"},
            {"ts": 1.0, "kind": "file_change",
             "files": [{"path": "a.ts", "op": "write", "new_bytes": 100}]},
            {"ts": 2.0, "kind": "file_change",
             "files": [{"path": "a.ts", "op": "edit", "old_bytes": 5, "new_bytes": 9}]},
        ],
    }
    doc.update(overrides)
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


class TestEvaluateCommand:
    def test_clean_fixture_exits_zero(self, tmp_path, capsys):
        assert main(fixture_args("lumen-notes", tmp_path / "out")) == EXIT_OK
        out = capsys.readouterr().out
        assert "S=0.8889" in out
        assert (tmp_path / "out" / "evaluation.report.json").exists()
        assert (tmp_path / "out" / "report.txt").exists()

    def test_unresolved_page_exits_two_with_report(self, tmp_path, capsys):
        assert main(fixture_args("orbit-board", tmp_path / "out")) == EXIT_PARTIAL
        assert (tmp_path / "out" / "evaluation.report.json").exists()
        assert "PageUnresolved: pricing" in capsys.readouterr().err

    def test_byte_identical_reports_across_runs(self, tmp_path):
        main(fixture_args("petal-shop", tmp_path / "a"))
        main(fixture_args("petal-shop", tmp_path / "b"))
        a = (tmp_path / "a" / "evaluation.report.json").read_bytes()
        b = (tmp_path / "b" / "evaluation.report.json").read_bytes()
        assert a == b

    def test_missing_annotation_exits_usage(self, tmp_path, capsys):
        code = main([
            "evaluate", str(tmp_path / "missing.json"),
            "--snapshots", str(APPS / "lumen-notes" / "snapshots"),
            "--out", str(tmp_path / "out"),
        ])
        assert code == EXIT_USAGE
        assert "SchemaError" in capsys.readouterr().err

    def test_live_without_browser_endpoint_exits_environment(self, tmp_path, capsys,
                                                             monkeypatch):
        monkeypatch.delenv("SPECEVAL_BROWSER_ENDPOINT", raising=False)
        code = main([
            "evaluate", str(APPS / "lumen-notes" / "task.annotation.json"),
            "--app-url", "http://127.0.0.1:1/",
            "--out", str(tmp_path / "out"),
        ])
        assert code == EXIT_ENVIRONMENT

    def test_unreachable_browser_exits_environment(self, tmp_path):
        code = main([
            "evaluate", str(APPS / "lumen-notes" / "task.annotation.json"),
            "--app-url", "http://127.0.0.1:1/",
            "--browser-endpoint", "http://127.0.0.1:1",
            "--out", str(tmp_path / "out"),
        ])
        assert code == EXIT_ENVIRONMENT

    def test_bad_viewport_is_usage_error(self, tmp_path):
        code = main(fixture_args("lumen-notes", tmp_path / "out",
                                 extra=["--viewport", "wide"]))
        assert code == EXIT_USAGE


class TestAnalyticsCommands:
    def test_diffscore_table(self, tmp_path, capsys):
        trace = write_trace(tmp_path)
        code = main(["diffscore", str(trace), "--out", str(tmp_path / "out")])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "Surgical" in out
        assert (tmp_path / "out" / "diffscore.json").exists()
        assert (tmp_path / "out" / "diffscore.txt").exists()

    def test_diffscore_grouping(self, tmp_path, capsys):
        a = write_trace(tmp_path, "a.json", run_id="r1", model="opus", score=0.2)
        b = write_trace(tmp_path, "b.json", run_id="r2", model="opus", score=0.4)
        code = main(["diffscore", str(a), str(b), "--group-by", "model"])
        assert code == EXIT_OK
        assert "[opus] n=2" in capsys.readouterr().out

    def test_corrupt_trace_warns_but_exits_zero(self, tmp_path, capsys):
        good = write_trace(tmp_path)
        bad = tmp_path / "bad.json"
        bad.write_text("nope")
        code = main(["diffscore", str(good), str(bad)])
        assert code == EXIT_OK
        captured = capsys.readouterr()
        assert "warning:" in captured.err

    def test_all_corrupt_exits_usage(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("nope")
        assert main(["diffscore", str(bad)]) == EXIT_USAGE

    def test_trajectory_with_raster(self, tmp_path, capsys):
        trace = write_trace(tmp_path)
        code = main([
            "trajectory", str(trace),
            "--raster", "raster.svg",
            "--out", str(tmp_path / "out"),
        ])
        assert code == EXIT_OK
        assert (tmp_path / "out" / "raster.svg").exists()
        assert "action mix" in capsys.readouterr().out

    def test_trajectory_rows_sum_to_one(self, tmp_path, capsys):
        trace = write_trace(tmp_path)
        assert main(["trajectory", str(trace)]) == EXIT_OK
        # row-normalized transition table prints 1.000 rows for observed rows
        assert "n=" in capsys.readouterr().out


class TestVisualCommand:
    def test_cached_vectors_survive_provider_down(self, tmp_path, capsys, monkeypatch):
        import hashlib

        base = APPS / "lumen-notes"
        cache = tmp_path / "cache"
        cache.mkdir()
        shots = tmp_path / "shots"
        shots.mkdir()
        for page in ("home", "settings"):
            data = (base / "mockups" / f"{page}.png").read_bytes()
            (shots / f"{page}.png").write_bytes(data)
            digest = hashlib.sha256(data).hexdigest()
            (cache / f"{digest}.vec.json").write_text(
                json.dumps({"format_version": 1, "dimension": 2, "values": [1.0, 0.0]})
            )
        monkeypatch.delenv("SPECEVAL_EMBED_ENDPOINT", raising=False)
        code = main([
            "visual", str(base / "task.annotation.json"),
            "--screenshots", str(shots),
            "--cache", str(cache),
            "--out", str(tmp_path / "out"),
        ])
        assert code == EXIT_OK
        assert "mean similarity: 1.0000" in capsys.readouterr().out

    def test_provider_down_no_cache_exits_environment(self, tmp_path, monkeypatch):
        monkeypatch.delenv("SPECEVAL_EMBED_ENDPOINT", raising=False)
        base = APPS / "lumen-notes"
        shots = tmp_path / "shots"
        shots.mkdir()
        for page in ("home", "settings"):
            (shots / f"{page}.png").write_bytes(
                (base / "mockups" / f"{page}.png").read_bytes()
            )
        code = main([
            "visual", str(base / "task.annotation.json"),
            "--screenshots", str(shots),
            "--cache", str(tmp_path / "cache"),
            "--out", str(tmp_path / "out"),
        ])
        assert code == EXIT_ENVIRONMENT


class TestUsage:
    def test_unknown_command_is_usage(self):
        assert main(["frobnicate"]) == EXIT_USAGE

    def test_evaluate_requires_source(self, tmp_path):
        code = main(["evaluate", str(APPS / "lumen-notes" / "task.annotation.json")])
        assert code == EXIT_USAGE

    def test_annotate_missing_dir_is_usage(self, tmp_path):
        assert main(["annotate", str(tmp_path / "nope")]) == EXIT_USAGE

    def test_annotate_port_in_use_exits_environment(self, tmp_path):
        import socket

        blocker = socket.socket()
        blocker.bind(("127.0.0.1", 0))
        blocker.listen(1)
        port = blocker.getsockname()[1]
        try:
            code = main(["annotate", str(tmp_path), "--port", str(port)])
        finally:
            blocker.close()
        assert code == EXIT_ENVIRONMENT
