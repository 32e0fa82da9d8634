"""Scene-graph model: canonical serialization, validation, and metrics
against a Floyd-Warshall all-pairs oracle."""

import json
import random

import pytest

from worldgen.errors import SchemaError, ValidationError
from worldgen.scenegraph import (
    AssetSpec,
    RoomNode,
    SceneGraph3D,
    compute_graph_metrics,
    graph_from_dict,
    graph_to_dict,
    make_edges,
    parse_scene_graph,
    serialize_scene_graph,
)


def simple_graph(edges=(("a", "b"), ("b", "c"))):
    ids = sorted({r for e in edges for r in e})
    return SceneGraph3D(
        rooms=tuple(RoomNode(id=r, category="room", assets=()) for r in ids),
        edges=make_edges(edges),
        external_doorways=(ids[0],),
        context="generic",
        difficulty=1,
    )


def floyd_warshall_diameter(g):
    ids = sorted(r.id for r in g.rooms)
    idx = {r: i for i, r in enumerate(ids)}
    n = len(ids)
    inf = float("inf")
    d = [[0 if i == j else inf for j in range(n)] for i in range(n)]
    for a, b in g.edge_pairs():
        d[idx[a]][idx[b]] = d[idx[b]][idx[a]] = 1
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    worst = max(d[i][j] for i in range(n) for j in range(n))
    return -1 if worst == inf else int(worst)


class TestValidation:
    def test_requires_room(self):
        with pytest.raises(ValidationError):
            SceneGraph3D(rooms=(), edges=frozenset(), external_doorways=(),
                         context="generic", difficulty=1)

    def test_rejects_self_loop(self):
        with pytest.raises(ValidationError):
            simple_graph((("a", "a"),))

    def test_rejects_unknown_edge_endpoint(self):
        rooms = (RoomNode(id="a", category="x", assets=()),)
        with pytest.raises(ValidationError):
            SceneGraph3D(rooms=rooms, edges=make_edges((("a", "zz"),)),
                         external_doorways=("a",), context="generic", difficulty=1)

    def test_rejects_unknown_external(self):
        rooms = (RoomNode(id="a", category="x", assets=()),)
        with pytest.raises(ValidationError):
            SceneGraph3D(rooms=rooms, edges=frozenset(),
                         external_doorways=("zz",), context="generic", difficulty=1)

    def test_requires_external_doorway(self):
        rooms = (RoomNode(id="a", category="x", assets=()),)
        with pytest.raises(ValidationError):
            SceneGraph3D(rooms=rooms, edges=frozenset(), external_doorways=(),
                         context="generic", difficulty=1)

    def test_rejects_bad_context(self):
        with pytest.raises(ValidationError):
            SceneGraph3D(
                rooms=(RoomNode(id="a", category="x", assets=()),),
                edges=frozenset(), external_doorways=("a",),
                context="spaceship", difficulty=1)

    def test_asset_spec_validation(self):
        with pytest.raises(ValidationError):
            AssetSpec(description="", size=(1, 1, 1), color="red")
        with pytest.raises(ValidationError):
            AssetSpec(description="chair", size=(0, 1, 1), color="red")
        with pytest.raises(ValidationError):
            AssetSpec(description="chair", size=(1, 1, 1), color="Red Velvet")
        AssetSpec(description="chair", size=(1, 1, 1), color="oak-brown")


class TestSerialization:
    def test_round_trip(self):
        g = simple_graph()
        assert graph_from_dict(graph_to_dict(g)) == g
        assert parse_scene_graph(serialize_scene_graph(g)) == g

    def test_canonical_bytes_stable_under_order(self):
        a = simple_graph((("a", "b"), ("b", "c")))
        b = simple_graph((("b", "c"), ("a", "b")))
        assert serialize_scene_graph(a) == serialize_scene_graph(b)

    def test_rooms_and_edges_sorted(self):
        doc = graph_to_dict(simple_graph((("c", "b"), ("b", "a"))))
        assert [r["id"] for r in doc["rooms"]] == sorted(r["id"] for r in doc["rooms"])
        assert doc["edges"] == sorted(doc["edges"])
        assert doc["version"] == "1"

    def test_parse_rejects_malformed(self):
        with pytest.raises(SchemaError):
            parse_scene_graph(b"not json{")
        with pytest.raises(SchemaError):
            graph_from_dict({"version": "1", "rooms": "nope"})

    def test_serialized_is_utf8_json_with_newline(self):
        raw = serialize_scene_graph(simple_graph())
        assert raw.endswith(b"\n")
        json.loads(raw.decode("utf-8"))


class TestMetrics:
    def test_path_graph(self):
        m = compute_graph_metrics(simple_graph((("a", "b"), ("b", "c"))))
        assert m.rooms == 3 and m.edges == 2
        assert m.diameter == 2
        assert m.leaf_rooms == 2
        assert m.connected

    def test_single_room(self):
        g = SceneGraph3D(
            rooms=(RoomNode(id="a", category="x", assets=()),),
            edges=frozenset(), external_doorways=("a",),
            context="generic", difficulty=1)
        m = compute_graph_metrics(g)
        assert m.diameter == 0 and m.connected

    def test_diameter_matches_floyd_warshall_on_random_graphs(self):
        rng = random.Random(99)
        for _ in range(60):
            n = 12
            ids = [f"r{i}" for i in range(n)]
            # random connected graph: spanning tree + extras
            edges = set()
            for i in range(1, n):
                j = rng.randrange(i)
                edges.add((ids[j], ids[i]))
            for _ in range(rng.randint(0, 8)):
                i, j = rng.sample(range(n), 2)
                edges.add((ids[min(i, j)], ids[max(i, j)]))
            g = SceneGraph3D(
                rooms=tuple(RoomNode(id=r, category="x", assets=()) for r in ids),
                edges=make_edges(edges), external_doorways=(ids[0],),
                context="generic", difficulty=1)
            m = compute_graph_metrics(g)
            assert m.diameter == floyd_warshall_diameter(g)

    def test_disconnected_diameter(self):
        g = SceneGraph3D(
            rooms=tuple(RoomNode(id=r, category="x", assets=()) for r in "abcd"),
            edges=make_edges((("a", "b"),)),
            external_doorways=("a",), context="generic", difficulty=1)
        m = compute_graph_metrics(g)
        assert not m.connected
        assert m.diameter == -1

    def test_assets_counted(self):
        spec = AssetSpec(description="chair", size=(1, 1, 1), color="red")
        g = SceneGraph3D(
            rooms=(RoomNode(id="a", category="x", assets=(spec, spec)),
                   RoomNode(id="b", category="x", assets=(spec,))),
            edges=make_edges((("a", "b"),)),
            external_doorways=("a",), context="generic", difficulty=1)
        assert compute_graph_metrics(g).assets == 3
