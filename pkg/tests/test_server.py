"""HTTP API: generation, world store, DB query/annotate/rebuild, extraction,
metrics, and error codes, via the in-process test client."""

import json

import pytest
from fastapi.testclient import TestClient

from worldgen.server import create_app


@pytest.fixture(scope="module")
def client(tmp_path_factory):
    store = tmp_path_factory.mktemp("server-store")
    app = create_app(store)
    with TestClient(app) as c:
        yield c


@pytest.fixture(scope="module")
def generated(client):
    payload = {"spec": {"levels": [1, 2], "worlds_per_level": 1, "seed": 11}}
    r = client.post("/api/generate", json=payload)
    assert r.status_code == 200
    return r.json()


class TestGenerate:
    def test_spec_generation(self, generated):
        assert len(generated["worldIds"]) == 2
        assert generated["failures"] == []
        assert set(generated["timings"]) >= {"layout", "dbquery", "fit",
                                             "scenario", "export", "total"}

    def test_prompt_generation(self, client):
        r = client.post("/api/generate",
                        json={"prompt": "2 worlds, difficulty levels 1 to 2",
                              "seed": 4})
        assert r.status_code == 200
        assert len(r.json()["worldIds"]) == 2

    def test_graph_generation(self, client):
        graph = {
            "version": "1",
            "rooms": [{"id": "a", "category": "room", "assets": []},
                      {"id": "b", "category": "room", "assets": []}],
            "edges": [["a", "b"]],
            "external_doorways": ["a"],
            "context": "generic",
            "difficulty": 1,
        }
        r = client.post("/api/generate", json={"graph": graph, "seed": 2})
        assert r.status_code == 200
        assert len(r.json()["worldIds"]) == 1

    def test_determinism_over_http(self, client):
        payload = {"spec": {"levels": [1], "worlds_per_level": 1, "seed": 99}}
        a = client.post("/api/generate", json=payload).json()
        b = client.post("/api/generate", json=payload).json()
        assert a["worldIds"] == b["worldIds"]

    def test_invalid_request_maps_to_400(self, client):
        r = client.post("/api/generate", json={"seed": 1})
        assert r.status_code == 400
        assert r.json()["code"] == "InvalidRequest"


class TestWorldStore:
    def test_manifest(self, client, generated):
        wid = generated["worldIds"][0]
        r = client.get(f"/api/worlds/{wid}")
        assert r.status_code == 200
        doc = r.json()
        assert doc["worldId"] == wid
        assert "map.pgm" in doc["files"]
        assert doc["provenance"]["world_id"] == wid

    def test_resources_served_with_media_types(self, client, generated):
        wid = generated["worldIds"][0]
        cases = {
            "floorplan.svg": "image/svg+xml",
            "map.pgm": "application/octet-stream",
            "scenario.yaml": "text/yaml",
            "graph.json": "application/json",
        }
        for name, media in cases.items():
            r = client.get(f"/api/worlds/{wid}/{name}")
            assert r.status_code == 200
            assert r.headers["content-type"].startswith(media)
            assert r.content

    def test_unknown_world_404(self, client):
        assert client.get("/api/worlds/nope").status_code == 404
        assert client.get("/api/worlds/nope/map.pgm").status_code == 404

    def test_unknown_resource_404(self, client, generated):
        wid = generated["worldIds"][0]
        r = client.get(f"/api/worlds/{wid}/secrets.txt")
        assert r.status_code == 404
        assert r.json()["code"] == "UnknownResource"


class TestDbEndpoints:
    def test_query(self, client):
        r = client.post("/api/db/query",
                        json={"text": "red chair", "k": 3,
                              "filter": {"tags": ["obstacle"]}})
        assert r.status_code == 200
        doc = r.json()
        assert len(doc["results"]) == 3
        assert all("obstacle" in hit["tags"] for hit in doc["results"])
        assert doc["results"][0]["score"] >= doc["results"][-1]["score"]

    def test_query_validation_maps_to_400(self, client):
        r = client.post("/api/db/query", json={"text": ""})
        assert r.status_code == 400

    def test_version_endpoint(self, client):
        doc = client.get("/api/db/version").json()
        assert doc["records"] >= 115
        assert doc["bundleVersion"] >= 1

    def test_annotate_rebuild_query_cycle(self, client):
        mid = client.post("/api/db/query",
                          json={"text": "sofa", "k": 1}).json()["results"][0]["id"]
        r = client.put(f"/api/db/annotations/{mid}",
                       json={"description": "plum velvet chesterfield sofa"})
        assert r.status_code == 200 and r.json()["staged"]

        # second staged edit without overwrite conflicts
        r = client.put(f"/api/db/annotations/{mid}", json={"description": "x y z"})
        assert r.status_code == 409
        r = client.put(f"/api/db/annotations/{mid}",
                       json={"description": "plum velvet chesterfield sofa",
                             "overwrite": True})
        assert r.status_code == 200

        before = client.get("/api/db/version").json()["bundleVersion"]
        r = client.post("/api/db/rebuild")
        assert r.status_code == 200
        assert r.json()["bundleVersion"] == before + 1

        hit = client.post("/api/db/query",
                          json={"text": "plum velvet chesterfield sofa",
                                "k": 1}).json()["results"][0]
        assert hit["id"] == mid
        assert hit["description"] == "plum velvet chesterfield sofa"

    def test_annotate_unknown_model_404(self, client):
        r = client.put("/api/db/annotations/no-such-model",
                       json={"description": "x"})
        assert r.status_code == 404


class TestExtractAndMetrics:
    def test_extract(self, client):
        annotation = {
            "rooms": [
                {"id": "a", "category": "room",
                 "polygon": [[0, 0], [4, 0], [4, 3], [0, 3]]},
                {"id": "b", "category": "room",
                 "polygon": [[4, 0], [8, 0], [8, 3], [4, 3]]},
            ],
            "assets": [{"category": "chair", "box": [1, 1, 1.5, 1.5]}],
            "doorways": [{"a": [4, 1.0], "b": [4, 1.9]}],
            "context": "generic",
        }
        r = client.post("/api/extract", json={"annotation": annotation})
        assert r.status_code == 200
        doc = r.json()
        assert [rm["id"] for rm in doc["rooms"]] == ["a", "b"]
        assert doc["edges"] == [["a", "b"]]

    def test_extract_bad_annotation_400(self, client):
        r = client.post("/api/extract", json={"annotation": {"rooms": []}})
        assert r.status_code == 400

    def test_metrics_csv(self, client, generated):
        ids = ",".join(generated["worldIds"])
        r = client.get(f"/api/metrics?ids={ids}")
        assert r.status_code == 200
        assert r.headers["content-type"].startswith("text/csv")
        assert r.text.startswith("world_id,level")

    def test_metrics_unknown_world_404(self, client):
        assert client.get("/api/metrics?ids=zzz").status_code == 404

    def test_metrics_empty_400(self, client):
        assert client.get("/api/metrics").status_code == 400


class TestStatic:
    def test_static_mount(self, tmp_path):
        (tmp_path / "ui").mkdir()
        (tmp_path / "ui" / "index.html").write_text("<html>ok</html>")
        app = create_app(tmp_path / "store", static_dir=tmp_path / "ui")
        with TestClient(app) as c:
            r = c.get("/")
            assert r.status_code == 200
            assert "ok" in r.text
