"""Hierarchical room/asset scene graph: data model, canonical JSON, metrics.

The graph is exactly two levels deep: rooms connected by doorway edges on
top, asset specs attached to rooms below. All types are frozen; operations
are pure functions.
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field

from .errors import SchemaError, ValidationError

DOCUMENT_VERSION = "1"
CONTEXTS = ("hospital", "residential", "office", "generic")

_COLOR_RE = re.compile(r"^[a-z][a-z0-9-]*$")


@dataclass(frozen=True)
class AssetSpec:
    """An object to place in a room: free-text description, size, color."""

    description: str
    size: tuple[float, float, float]  # (width, depth, height) meters
    color: str

    def __post_init__(self) -> None:
        if not self.description:
            raise ValidationError("asset description must be non-empty")
        if len(self.size) != 3 or any(s <= 0 for s in self.size):
            raise ValidationError(f"asset size must be 3 positive numbers, got {self.size}")
        if not _COLOR_RE.match(self.color):
            raise ValidationError(f"invalid color token {self.color!r}")


@dataclass(frozen=True)
class RoomNode:
    id: str
    category: str
    assets: tuple[AssetSpec, ...] = ()

    def __post_init__(self) -> None:
        if not self.id:
            raise ValidationError("room id must be non-empty")
        if not self.category:
            raise ValidationError(f"room {self.id!r}: category must be non-empty")


@dataclass(frozen=True)
class SceneGraph3D:
    rooms: tuple[RoomNode, ...]
    edges: frozenset[frozenset[str]]
    external_doorways: tuple[str, ...]  # multiset of room ids
    context: str = "generic"
    difficulty: int = 1

    def __post_init__(self) -> None:
        if not self.rooms:
            raise ValidationError("graph must contain at least 1 room")
        ids = [r.id for r in self.rooms]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValidationError(f"duplicate room ids: {dupes}")
        id_set = set(ids)
        for edge in self.edges:
            pair = sorted(edge)
            if len(pair) != 2:
                raise ValidationError(f"self-loop edge on {pair[0]!r}")
            for rid in pair:
                if rid not in id_set:
                    raise ValidationError(f"edge references unknown room {rid!r}")
        if not self.external_doorways:
            raise ValidationError("graph must have at least 1 external doorway")
        for rid in self.external_doorways:
            if rid not in id_set:
                raise ValidationError(f"external doorway on unknown room {rid!r}")
        if self.context not in CONTEXTS:
            raise ValidationError(f"unknown context {self.context!r}")
        if self.difficulty < 1:
            raise ValidationError(f"difficulty must be >= 1, got {self.difficulty}")

    def room(self, rid: str) -> RoomNode:
        for r in self.rooms:
            if r.id == rid:
                return r
        raise KeyError(rid)

    def edge_pairs(self) -> list[tuple[str, str]]:
        """Edges as sorted (min, max) pairs, lexicographically ordered."""
        return sorted(tuple(sorted(e)) for e in self.edges)

    def adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {r.id: set() for r in self.rooms}
        for a, b in self.edge_pairs():
            adj[a].add(b)
            adj[b].add(a)
        return adj


def make_edges(pairs) -> frozenset[frozenset[str]]:
    return frozenset(frozenset(p) for p in pairs)


@dataclass(frozen=True)
class GraphMetrics:
    rooms: int
    leaf_rooms: int
    assets: int
    edges: int
    diameter: int  # hops; 0 for a single room, -1 if disconnected
    connected: bool
    difficulty: int


def _bfs_distances(adj: dict[str, set[str]], start: str) -> dict[str, int]:
    dist = {start: 0}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for nxt in adj[node]:
            if nxt not in dist:
                dist[nxt] = dist[node] + 1
                queue.append(nxt)
    return dist


def compute_graph_metrics(g: SceneGraph3D) -> GraphMetrics:
    """All six plotted metrics; diameter via BFS from every node."""
    adj = g.adjacency()
    n = len(g.rooms)
    connected = True
    diameter = 0
    for rid in adj:
        dist = _bfs_distances(adj, rid)
        if len(dist) != n:
            connected = False
            break
        diameter = max(diameter, max(dist.values()))
    if not connected:
        diameter = -1
    leaf = sum(1 for rid, nbrs in adj.items() if len(nbrs) == 1)
    return GraphMetrics(
        rooms=n,
        leaf_rooms=leaf,
        assets=sum(len(r.assets) for r in g.rooms),
        edges=len(g.edges),
        diameter=diameter,
        connected=connected,
        difficulty=g.difficulty,
    )


def graph_to_dict(g: SceneGraph3D) -> dict:
    """Canonical dict form: rooms sorted by id, edges as sorted pairs."""
    return {
        "version": DOCUMENT_VERSION,
        "context": g.context,
        "difficulty": g.difficulty,
        "rooms": [
            {
                "id": r.id,
                "category": r.category,
                "assets": [
                    {
                        "description": a.description,
                        "size": [a.size[0], a.size[1], a.size[2]],
                        "color": a.color,
                    }
                    for a in r.assets
                ],
            }
            for r in sorted(g.rooms, key=lambda r: r.id)
        ],
        "edges": [list(p) for p in g.edge_pairs()],
        "external_doorways": sorted(g.external_doorways),
    }


def serialize_scene_graph(g: SceneGraph3D) -> bytes:
    """Canonical UTF-8 JSON bytes with LF endings and a trailing newline."""
    return (json.dumps(graph_to_dict(g), indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def graph_from_dict(doc: dict) -> SceneGraph3D:
    if not isinstance(doc, dict):
        raise SchemaError("document root must be an object")
    if doc.get("version") != DOCUMENT_VERSION:
        raise SchemaError(f"unsupported document version {doc.get('version')!r}")
    try:
        rooms = tuple(
            RoomNode(
                id=str(r["id"]),
                category=str(r["category"]),
                assets=tuple(
                    AssetSpec(
                        description=str(a["description"]),
                        size=(float(a["size"][0]), float(a["size"][1]), float(a["size"][2])),
                        color=str(a["color"]),
                    )
                    for a in r.get("assets", [])
                ),
            )
            for r in doc["rooms"]
        )
        raw_edges = [tuple(str(x) for x in e) for e in doc.get("edges", [])]
        externals = tuple(str(x) for x in doc.get("external_doorways", []))
        context = str(doc.get("context", "generic"))
        difficulty = int(doc.get("difficulty", 1))
    except (KeyError, TypeError, IndexError) as exc:
        raise SchemaError(f"malformed document: {exc!r}") from exc
    for e in raw_edges:
        if len(e) != 2:
            raise SchemaError(f"edge must have 2 endpoints, got {list(e)}")
        if e[0] == e[1]:
            raise ValidationError(f"self-loop edge on {e[0]!r}")
    return SceneGraph3D(
        rooms=rooms,
        edges=make_edges(raw_edges),
        external_doorways=externals,
        context=context,
        difficulty=difficulty,
    )


def parse_scene_graph(data: bytes | str) -> SceneGraph3D:
    """Parse and validate a scene-graph JSON document."""
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return graph_from_dict(doc)
