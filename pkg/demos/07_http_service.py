"""
The HTTP service: search, stats, health, reindex
================================================

Drives the FastAPI app in-process with a test client; the same endpoints are
what `crossqa serve` exposes and what the web UI consumes.
"""
import json

from fastapi.testclient import TestClient

from crossqa import build_dense_index
from crossqa.service import EngineSnapshot, SearchService, create_app

from demo_data import AlignedEmbedder, aligned_extractor, sample_corpus, sample_translator

corpus = sample_corpus()
embedder = AlignedEmbedder(dim=64, seed=0)
docs = list(corpus)
vectors = embedder.embed_batch([d.body for d in docs], role="passage")
snapshot = EngineSnapshot(
    corpus=corpus,
    dense_index=build_dense_index((d.id, vectors[i]) for i, d in enumerate(docs)),
    embedder=embedder,
    extractor=aligned_extractor,
    translator=sample_translator(),
)
client = TestClient(create_app(SearchService(snapshot)))

print("GET /api/health")
print(json.dumps(client.get("/api/health").json(), indent=2))

print("\nGET /api/corpus/stats")
print(json.dumps(client.get("/api/corpus/stats").json(), indent=2))

print("\nPOST /api/search")
response = client.post("/api/search", json={
    "query": "how effective is the rovid vaccine",
    "k": 2,
    "langs": ["en", "es", "de"],
})
payload = response.json()
print(f"status {response.status_code}, {len(payload['results'])} results, "
      f"fallback={payload['fallback_used']}, {payload['timing_ms']:.1f} ms")
top = payload["results"][0]
print(f"top: {top['doc_id']} ({top['lang']}), spans={len(top['spans'])}, "
      f"colors={top['highlight_colors']}")

print("\nPOST /api/search with an empty query (machine-readable error code)")
bad = client.post("/api/search", json={"query": "  "})
print(f"status {bad.status_code}: {bad.json()}")

print("\nPOST /api/admin/reindex (rebuild offline, swap atomically)")
print(client.post("/api/admin/reindex").json())
