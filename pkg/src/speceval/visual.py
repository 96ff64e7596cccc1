"""Page-level visual similarity through a pluggable embedding provider.

The embedding model itself is external: vectors come from an HTTP
endpoint (POST of raw image bytes returning a JSON vector) or from the
filesystem cache `embeddings/<sha256>.vec.json`. With warm caches the
whole module is deterministic and needs no network.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import httpx

from .errors import DimensionMismatch, EmptyPairSet, InvariantError, ProviderUnavailable

ENDPOINT_ENV_VAR = "SPECEVAL_EMBED_ENDPOINT"


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]

    def __post_init__(self):
        norm = math.sqrt(sum(v * v for v in self.values))
        if not self.values or abs(norm - 1.0) > 1e-6:
            raise InvariantError(f"embedding must be unit length, got |v|={norm:.6g}")

    @property
    def dimension(self) -> int:
        return len(self.values)

    @classmethod
    def normalized(cls, raw: list[float]) -> "EmbeddingVector":
        norm = math.sqrt(sum(v * v for v in raw))
        if norm == 0 or not raw:
            raise InvariantError("cannot normalize an empty or zero vector")
        return cls(tuple(v / norm for v in raw))


def page_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity of two unit vectors."""
    if a.dimension != b.dimension:
        raise DimensionMismatch(f"{a.dimension} vs {b.dimension}")
    return sum(x * y for x, y in zip(a.values, b.values))


def task_similarity(
    pairs: list[tuple[EmbeddingVector | None, EmbeddingVector | None]],
    unresolved_floor: float = 0.0,
) -> float:
    """Mean per-page similarity; pages missing either side take the floor."""
    if not pairs:
        raise EmptyPairSet("no page pairs to compare")
    total = 0.0
    for mockup, screenshot in pairs:
        if mockup is None or screenshot is None:
            total += unresolved_floor
        else:
            total += page_similarity(mockup, screenshot)
    return total / len(pairs)


class EmbeddingProvider:
    """Vector source: append-only cache in front of an optional endpoint."""

    def __init__(self, cache_dir: str | Path, endpoint: str | None = None,
                 timeout_s: float = 30.0):
        self.cache_dir = Path(cache_dir)
        self.endpoint = endpoint if endpoint is not None else os.environ.get(ENDPOINT_ENV_VAR)
        self.timeout_s = timeout_s
        self._dimension: int | None = None

    def _cache_path(self, digest: str) -> Path:
        return self.cache_dir / f"{digest}.vec.json"

    def _check_dimension(self, vector: EmbeddingVector) -> EmbeddingVector:
        if self._dimension is None:
            self._dimension = vector.dimension
        elif vector.dimension != self._dimension:
            raise DimensionMismatch(
                f"provider switched from {self._dimension} to {vector.dimension} dimensions"
            )
        return vector

    def embed(self, image_bytes: bytes) -> EmbeddingVector:
        digest = hashlib.sha256(image_bytes).hexdigest()
        cached = self._cache_path(digest)
        if cached.exists():
            doc = json.loads(cached.read_text(encoding="utf-8"))
            return self._check_dimension(EmbeddingVector(tuple(doc["values"])))
        raw = self._call_endpoint(image_bytes)
        vector = EmbeddingVector.normalized(raw)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        cached.write_text(
            json.dumps(
                {"format_version": 1, "dimension": vector.dimension, "values": list(vector.values)}
            ),
            encoding="utf-8",
        )
        return self._check_dimension(vector)

    def _call_endpoint(self, image_bytes: bytes) -> list[float]:
        if not self.endpoint:
            raise ProviderUnavailable(
                f"no cached vector and no provider endpoint (set {ENDPOINT_ENV_VAR})"
            )
        try:
            response = httpx.post(
                self.endpoint,
                content=image_bytes,
                headers={"content-type": "application/octet-stream"},
                timeout=self.timeout_s,
            )
            response.raise_for_status()
            payload = response.json()
        except (httpx.HTTPError, ValueError) as e:
            raise ProviderUnavailable(f"embedding endpoint failed: {e}") from e
        if isinstance(payload, list):
            raw = payload
        elif isinstance(payload, dict):
            raw = payload.get("embedding", payload.get("values"))
        else:
            raw = None
        if not isinstance(raw, list) or not raw:
            raise ProviderUnavailable(f"embedding endpoint returned no vector: {payload!r}")
        return [float(v) for v in raw]


def embed(image_bytes: bytes, provider: EmbeddingProvider) -> EmbeddingVector:
    return provider.embed(image_bytes)
