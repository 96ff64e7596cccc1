import json
import math

import httpx
import pytest

from speceval.errors import (
    DimensionMismatch,
    EmptyPairSet,
    InvariantError,
    ProviderUnavailable,
)
from speceval.visual import EmbeddingProvider, EmbeddingVector, page_similarity, task_similarity


def unit(*values):
    return EmbeddingVector.normalized(list(values))


def fake_response(payload):
    return httpx.Response(
        200, json=payload, request=httpx.Request("POST", "http://embed.local")
    )


class TestVectors:
    def test_normalization(self):
        v = unit(3.0, 4.0)
        assert v.values == pytest.approx((0.6, 0.8))

    def test_non_unit_rejected(self):
        with pytest.raises(InvariantError):
            EmbeddingVector((1.0, 1.0))

    def test_zero_vector_rejected(self):
        with pytest.raises(InvariantError):
            EmbeddingVector.normalized([0.0, 0.0])


class TestPageSimilarity:
    def test_identical(self):
        v = unit(0.2, 0.5, 0.1)
        assert page_similarity(v, v) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert page_similarity(unit(1, 0), unit(0, 1)) == pytest.approx(0.0)

    def test_opposite(self):
        assert page_similarity(unit(1, 2), unit(-1, -2)) == pytest.approx(-1.0)

    def test_symmetry(self):
        a, b = unit(1, 2, 3), unit(-2, 0.5, 4)
        assert page_similarity(a, b) == pytest.approx(page_similarity(b, a), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            page_similarity(unit(1, 0), unit(1, 0, 0))


class TestTaskSimilarity:
    def test_all_identical_pages(self):
        v = unit(1, 1)
        assert task_similarity([(v, v), (v, v)]) == pytest.approx(1.0)

    def test_unresolved_page_takes_floor(self):
        v = unit(1, 0)
        w = EmbeddingVector.normalized([1.0, 0.75])
        sim = page_similarity(v, w)
        assert task_similarity([(v, w), (v, None)]) == pytest.approx(sim / 2)

    def test_order_invariant(self):
        a, b = unit(1, 2), unit(2, 1)
        pairs = [(a, b), (a, None), (b, b)]
        assert task_similarity(pairs) == pytest.approx(task_similarity(list(reversed(pairs))))

    def test_empty_raises(self):
        with pytest.raises(EmptyPairSet):
            task_similarity([])


class TestProvider:
    def test_no_endpoint_no_cache_raises(self, tmp_path, monkeypatch):
        monkeypatch.delenv("SPECEVAL_EMBED_ENDPOINT", raising=False)
        provider = EmbeddingProvider(tmp_path)
        with pytest.raises(ProviderUnavailable):
            provider.embed(b"image-bytes")

    def test_cache_round_trip_without_endpoint(self, tmp_path, monkeypatch):
        calls = []

        def fake_post(url, content=None, headers=None, timeout=None):
            calls.append(url)
            return fake_response({"embedding": [3.0, 4.0]})

        monkeypatch.setattr(httpx, "post", fake_post)
        provider = EmbeddingProvider(tmp_path, endpoint="http://embed.local/v1")
        first = provider.embed(b"image-bytes")
        assert first.values == pytest.approx((0.6, 0.8))
        assert len(calls) == 1

        # second call: served from cache, endpoint untouched even when down
        offline = EmbeddingProvider(tmp_path, endpoint=None)
        second = offline.embed(b"image-bytes")
        assert second == first
        assert len(calls) == 1

    def test_same_bytes_same_vector(self, tmp_path, monkeypatch):
        monkeypatch.setattr(
            httpx, "post",
            lambda url, **kw: fake_response([1.0, 2.0, 2.0]),
        )
        provider = EmbeddingProvider(tmp_path, endpoint="http://embed.local")
        assert provider.embed(b"x") == provider.embed(b"x")

    def test_dimension_switch_rejected(self, tmp_path, monkeypatch):
        responses = iter([[1.0, 0.0], [1.0, 0.0, 0.0]])
        monkeypatch.setattr(
            httpx, "post", lambda url, **kw: fake_response(next(responses))
        )
        provider = EmbeddingProvider(tmp_path, endpoint="http://embed.local")
        provider.embed(b"a")
        with pytest.raises(DimensionMismatch):
            provider.embed(b"b")

    def test_endpoint_failure_maps_to_provider_unavailable(self, tmp_path, monkeypatch):
        def boom(url, **kw):
            raise httpx.ConnectError("refused")

        monkeypatch.setattr(httpx, "post", boom)
        provider = EmbeddingProvider(tmp_path, endpoint="http://embed.local")
        with pytest.raises(ProviderUnavailable):
            provider.embed(b"a")

    def test_cache_file_shape(self, tmp_path, monkeypatch):
        monkeypatch.setattr(
            httpx, "post", lambda url, **kw: fake_response([0.0, 5.0])
        )
        provider = EmbeddingProvider(tmp_path, endpoint="http://embed.local")
        provider.embed(b"img")
        files = list(tmp_path.glob("*.vec.json"))
        assert len(files) == 1
        doc = json.loads(files[0].read_text())
        assert doc["dimension"] == 2
        assert math.isclose(sum(v * v for v in doc["values"]), 1.0, abs_tol=1e-9)
