import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from speceval.errors import InvariantError, NegativeBytes, SchemaError
from speceval.model import (
    BoundingBox,
    normalize_mutation,
    validate_evaluation_report,
    validate_page_snapshot,
    validate_run_trace,
    validate_task_annotation,
)

from helpers import clone, make_annotation_doc, make_snapshot_doc


class TestTaskAnnotation:
    def test_valid_document_accepted(self):
        task = validate_task_annotation(make_annotation_doc())
        assert task.task_name == "demo"
        assert len(task.pages) == 1
        assert len(task.pages[0].anchors) == 3
        assert len(task.pages[0].targets) == 5

    def test_single_anchor_rejected(self):
        doc = make_annotation_doc()
        doc["pages"][0]["anchors"] = doc["pages"][0]["anchors"][:1]
        with pytest.raises(InvariantError, match=r"anchors: expected 2\.\.5, got 1"):
            validate_task_annotation(doc)

    def test_six_anchors_rejected(self):
        doc = make_annotation_doc()
        anchors = doc["pages"][0]["anchors"]
        while len(anchors) < 6:
            anchors.append(
                {"label": f"<extra{len(anchors)}>", "point": {"x": 1.0, "y": 1.0}, "page_id": "home"}
            )
        with pytest.raises(InvariantError, match="expected 2..5, got 6"):
            validate_task_annotation(doc)

    def test_duplicate_anchor_label_rejected(self):
        doc = make_annotation_doc()
        doc["pages"][0]["anchors"][1]["label"] = "<search>"
        with pytest.raises(InvariantError, match="duplicate anchor label '<search>'"):
            validate_task_annotation(doc)

    def test_box_outside_mockup_rejected(self):
        doc = make_annotation_doc()
        doc["pages"][0]["targets"][0]["box"]["x"] = 1250.0  # width 120 overflows 1280
        with pytest.raises(InvariantError, match="outside mockup"):
            validate_task_annotation(doc)

    def test_error_names_offending_page(self):
        doc = make_annotation_doc()
        doc["pages"][0]["anchors"] = doc["pages"][0]["anchors"][:1]
        with pytest.raises(InvariantError, match="page 'home'"):
            validate_task_annotation(doc)

    def test_missing_field_is_schema_error(self):
        doc = make_annotation_doc()
        del doc["pages"][0]["mockup_size"]
        with pytest.raises(SchemaError, match="mockup_size"):
            validate_task_annotation(doc)

    def test_bad_interaction_variant(self):
        doc = make_annotation_doc()
        doc["pages"][0]["targets"][0]["interaction"]["variant"] = "hover"
        with pytest.raises(InvariantError, match="hover"):
            validate_task_annotation(doc)

    def test_duplicate_target_id_rejected(self):
        doc = make_annotation_doc()
        doc["pages"][0]["targets"][1]["id"] = doc["pages"][0]["targets"][0]["id"]
        with pytest.raises(InvariantError, match="duplicate target id"):
            validate_task_annotation(doc)

    def test_empty_pages_rejected(self):
        with pytest.raises(InvariantError, match="nonempty"):
            validate_task_annotation(make_annotation_doc(pages=[]))

    def test_anchor_box_reduced_to_center(self):
        doc = make_annotation_doc()
        doc["pages"][0]["anchors"][0] = {
            "label": "<search>",
            "box": {"x": 100.0, "y": 100.0, "width": 50.0, "height": 20.0},
            "page_id": "home",
        }
        task = validate_task_annotation(doc)
        assert task.pages[0].anchors[0].point == (125.0, 110.0)

    def test_anchor_label_pattern(self):
        doc = make_annotation_doc()
        doc["pages"][0]["anchors"][0]["label"] = "search"
        with pytest.raises(InvariantError, match="<name>"):
            validate_task_annotation(doc)

    def test_round_trip(self):
        doc = make_annotation_doc()
        task = validate_task_annotation(doc)
        again = validate_task_annotation(task.to_dict())
        assert again == task
        assert again.to_dict() == task.to_dict()


class TestPageSnapshot:
    def test_valid_snapshot(self):
        snap = validate_page_snapshot(make_snapshot_doc())
        assert len(snap.candidates) == 2
        assert snap.viewport == (1280, 800)

    def test_hidden_candidate_rejected(self):
        doc = make_snapshot_doc()
        doc["candidates"][0]["visible"] = False
        with pytest.raises(InvariantError, match="hidden"):
            validate_page_snapshot(doc)

    def test_zero_size_candidate_rejected(self):
        doc = make_snapshot_doc()
        doc["candidates"][0]["box"]["width"] = 0.0
        with pytest.raises(InvariantError, match="positive size"):
            validate_page_snapshot(doc)

    def test_below_fold_candidate_allowed(self):
        doc = make_snapshot_doc()
        doc["candidates"][0]["box"]["y"] = 5200.0
        snap = validate_page_snapshot(doc)
        assert snap.candidates[0].box.y == 5200.0

    def test_far_offscreen_candidate_rejected(self):
        doc = make_snapshot_doc()
        doc["candidates"][0]["box"]["x"] = 99999.0
        with pytest.raises(InvariantError, match="superset"):
            validate_page_snapshot(doc)

    def test_round_trip(self):
        snap = validate_page_snapshot(make_snapshot_doc())
        assert validate_page_snapshot(snap.to_dict()) == snap


class TestNormalizeMutation:
    def test_write_grow(self):
        m = normalize_mutation("Write", "a.py", before_bytes=500, new_bytes=800)
        assert (m.after_bytes, m.change_bytes) == (800, 800)

    def test_write_shrink(self):
        m = normalize_mutation("Write", "a.py", before_bytes=800, new_bytes=500)
        assert (m.after_bytes, m.change_bytes) == (500, 800)

    def test_edit(self):
        m = normalize_mutation("Edit", "a.py", before_bytes=1000, old_bytes=100, new_bytes=40)
        assert (m.after_bytes, m.change_bytes) == (940, 100)

    def test_delete(self):
        m = normalize_mutation("Delete", "a.py", before_bytes=300)
        assert (m.after_bytes, m.change_bytes) == (0, 300)

    def test_negative_bytes(self):
        with pytest.raises(NegativeBytes):
            normalize_mutation("Write", "a.py", before_bytes=-1, new_bytes=10)

    def test_unknown_kind(self):
        with pytest.raises(InvariantError):
            normalize_mutation("Move", "a.py", before_bytes=0)

    @given(
        before=st.integers(min_value=0, max_value=10**9),
        old=st.integers(min_value=0, max_value=10**9),
        new=st.integers(min_value=0, max_value=10**9),
    )
    def test_edit_change_bounds_net_delta(self, before, old, new):
        m = normalize_mutation("Edit", "f", before_bytes=before, old_bytes=old, new_bytes=new)
        assert m.change_bytes >= abs(m.after_bytes - m.before_bytes)


class TestRunTrace:
    def _doc(self):
        return {
            "format_version": 1,
            "run_id": "r1",
            "model_label": "opus",
            "condition_label": "C2",
            "task_label": "forum",
            "score": 0.25,
            "events": [
                {"timestamp": 0.0, "category": "inspect", "raw_kind": "tool:Read"},
                {"timestamp": 1.0, "category": "write", "files_touched": 3, "raw_kind": "file_change"},
            ],
            "mutations": [
                {"kind": "Write", "path": "a.py", "before_bytes": 0, "new_bytes": 100, "timestamp": 1.0}
            ],
            "scaffold_manifest": {"a.py": 0},
        }

    def test_valid_trace(self):
        trace = validate_run_trace(self._doc())
        assert trace.events[1].files_touched == 3
        assert trace.mutations[0].change_bytes == 100

    def test_out_of_order_events_rejected(self):
        doc = self._doc()
        doc["events"] = list(reversed(doc["events"]))
        with pytest.raises(InvariantError, match="nondecreasing"):
            validate_run_trace(doc)

    def test_inconsistent_stored_bytes_rejected(self):
        doc = self._doc()
        doc["mutations"][0]["after_bytes"] = 7
        with pytest.raises(InvariantError, match="contradicts"):
            validate_run_trace(doc)

    def test_failure_category_preserved(self):
        doc = self._doc()
        doc["events"].append(
            {"timestamp": 2.0, "category": "failure", "command_text": "npm run build"}
        )
        trace = validate_run_trace(doc)
        assert trace.events[-1].category == "failure"

    def test_round_trip(self):
        trace = validate_run_trace(self._doc())
        assert validate_run_trace(trace.to_dict()) == trace


class TestEvaluationReport:
    def _doc(self):
        rows = [
            {"target_id": "t1", "page_id": "home", "tier_name": "T1_IOU30", "L": 1.0, "B": 1.0,
             "matched_locator": "#a", "diagnostics": ""},
            {"target_id": "t2", "page_id": "home", "tier_name": "T2_IOU10", "L": 0.6, "B": 0.5,
             "matched_locator": "#b", "diagnostics": ""},
        ]
        s = (1.0 * 1.0 + 0.6 * 0.5) / 2
        return {
            "format_version": 1,
            "task_name": "demo",
            "generated_at": "2026-08-01T00:00:00Z",
            "per_annotation": rows,
            "per_page": [
                {"page_id": "home", "resolved_url": "http://x/", "mean_L": 0.8, "mean_B": 0.75,
                 "S_page": s}
            ],
            "aggregate": {"S": s, "mean_L": 0.8, "mean_B": 0.75, "N": 2},
            "overlay_refs": [],
            "notes": [],
        }

    def test_valid_report(self):
        report = validate_evaluation_report(self._doc())
        assert report.aggregate.S == pytest.approx(0.65, abs=1e-15)

    def test_recompute_mismatch_rejected(self):
        doc = self._doc()
        doc["aggregate"]["S"] = 0.9
        with pytest.raises(InvariantError, match="recomputed"):
            validate_evaluation_report(doc)

    def test_l_out_of_range_rejected(self):
        doc = self._doc()
        doc["per_annotation"][0]["L"] = 1.5
        with pytest.raises(InvariantError):
            validate_evaluation_report(doc)

    @given(
        lb=st.lists(
            st.tuples(
                st.sampled_from([0.0, 0.1, 0.15, 0.3, 0.6, 1.0]),
                st.sampled_from([0.0, 0.5, 1.0]),
            ),
            min_size=1,
            max_size=20,
        )
    )
    def test_recomputed_s_accepted_within_tolerance(self, lb):
        rows = [
            {"target_id": f"t{i}", "page_id": "p", "tier_name": "T1_IOU30", "L": L, "B": B,
             "matched_locator": None, "diagnostics": ""}
            for i, (L, B) in enumerate(lb)
        ]
        s = sum(L * B for L, B in lb) / len(lb)
        doc = {
            "per_annotation": rows,
            "per_page": [],
            "aggregate": {
                "S": s,
                "mean_L": sum(L for L, _ in lb) / len(lb),
                "mean_B": sum(B for _, B in lb) / len(lb),
                "N": len(lb),
            },
        }
        report = validate_evaluation_report(doc)
        assert math.isclose(report.aggregate.S, s, abs_tol=1e-12)


class TestBoundingBox:
    def test_center(self):
        assert BoundingBox(10, 20, 100, 50).center == (60.0, 45.0)

    def test_nonfinite_rejected(self):
        with pytest.raises(InvariantError):
            BoundingBox(float("nan"), 0, 10, 10)

    def test_negative_size_rejected(self):
        with pytest.raises(InvariantError):
            BoundingBox(0, 0, -5, 10)
