"""Graph synthesis and floor-plan realization.

synthesize_graph builds a connected scene graph from difficulty targets
(spanning tree plus extra edges). synthesize_floorplan realizes a graph as a
rectilinear floor plan via recursive binary space partition; rooms are BSP
leaves, doorways sit on shared walls, and each asset gets a rectangular zone
inside its room. Both are pure given (input, seed).
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field

from . import geometry as geo
from .errors import LayoutFailure, ValidationError
from .config import default_calibration
from .prompting import DifficultyTargets
from .scenegraph import (
    AssetSpec,
    RoomNode,
    SceneGraph3D,
    compute_graph_metrics,
    make_edges,
)

RESOLUTION = 0.05           # meters per grid cell
AREA_PER_ROOM = 9.0         # m^2 budget per room
MIN_ROOM_SIDE = 2.0         # meters
DOOR_WIDTH = 0.9            # meters
WALL_THICKNESS = 0.15       # meters
ZONE_CLEARANCE = 0.1        # zone-to-wall clearance, meters
DOOR_SWING = 0.9            # doorway keep-clear depth into each room, meters
ZONE_MARGIN = 0.2           # zone size = asset footprint + margin, meters
MAX_RESTARTS = 50
MAX_TREE_DEGREE = 4

Rect = tuple[float, float, float, float]  # x0, y0, x1, y1

_TOL = 1e-6
# Shared wall must fit the door plus a corner margin on each side.
_MIN_SHARED_WALL = DOOR_WIDTH + 0.2  # door leaf plus frame clearance


def _snap(v: float) -> float:
    """Snap to the RESOLUTION grid so equal walls compare exactly."""
    return round(v / RESOLUTION) / (1.0 / RESOLUTION)


@dataclass(frozen=True)
class Doorway:
    a: geo.Point
    b: geo.Point
    width: float
    kind: str  # "inter_room" | "external"
    rooms: tuple[str, ...]


@dataclass(frozen=True)
class AssetZone:
    room_id: str
    polygon: tuple[geo.Point, ...]
    asset_index: int  # index into the room's asset list
    spec: AssetSpec


@dataclass(frozen=True)
class FloorPlanRoom:
    room_id: str
    polygon: tuple[geo.Point, ...]
    category: str


@dataclass(frozen=True)
class FloorPlan:
    resolution: float
    bounds: Rect
    rooms: tuple[FloorPlanRoom, ...]
    doorways: tuple[Doorway, ...]
    zones: tuple[AssetZone, ...]
    context: str
    difficulty: int
    dropped_edges: tuple[tuple[str, str], ...] = ()
    unallocated_zones: tuple[tuple[str, int], ...] = ()  # (room_id, asset_index)

    def room(self, rid: str) -> FloorPlanRoom:
        for r in self.rooms:
            if r.room_id == rid:
                return r
        raise KeyError(rid)


# ---------------------------------------------------------------------------
# Graph synthesis


def _draw_poisson(mean: float, rng: random.Random) -> int:
    """Knuth's method; adequate for small means."""
    limit = math.exp(-mean)
    k, p = 0, 1.0
    while True:
        p *= rng.random()
        if p <= limit:
            return k
        k += 1


def synthesize_graph(targets: DifficultyTargets, context: str,
                     rng: random.Random,
                     calibration: dict | None = None) -> SceneGraph3D:
    """Connected graph hitting the targets: tree + extra edges.

    The spanning tree attaches each new room to a minimal-depth parent with
    degree < 4, which keeps the graph diameter at most ~log of the room
    count; extra edges only shorten it further.
    """
    cal = calibration or default_calibration()
    n = max(1, targets.rooms_target + rng.choice([-1, 0, 1]))
    ids = [f"room-{i:03d}" for i in range(n)]
    categories = cal["room_categories"].get(context, cal["room_categories"]["generic"])

    depth = {0: 0}
    degree = {0: 0}
    tree: list[tuple[int, int]] = []
    for i in range(1, n):
        eligible = [j for j in range(i) if degree[j] < MAX_TREE_DEGREE]
        dmin = min(depth[j] for j in eligible)
        parent = rng.choice([j for j in eligible if depth[j] == dmin])
        tree.append((parent, i))
        depth[i] = depth[parent] + 1
        degree[i] = 1
        degree[parent] += 1

    edges = {(min(a, b), max(a, b)) for a, b in tree}
    n_extra = int(targets.extra_edge_fraction * n)
    # extra edges go between low-degree rooms: high-degree hubs cannot put
    # every doorway on a shared wall, while leaf rooms gain alternatives
    for _ in range(n_extra):
        non_edges = [
            (i, j) for i in range(n) for j in range(i + 1, n)
            if (i, j) not in edges
            and degree[i] < MAX_TREE_DEGREE and degree[j] < MAX_TREE_DEGREE
        ]
        if not non_edges:
            break
        lowest = min(degree[i] + degree[j] for i, j in non_edges)
        a, b = rng.choice([e for e in non_edges
                           if degree[e[0]] + degree[e[1]] == lowest])
        edges.add((a, b))
        degree[a] += 1
        degree[b] += 1
    edges = {(ids[a], ids[b]) for a, b in edges}

    rooms = []
    for rid in ids:
        count = _draw_poisson(targets.assets_per_room_mean, rng)
        assets = tuple(_draw_asset(context, rng) for _ in range(count))
        rooms.append(RoomNode(id=rid, category=rng.choice(categories), assets=assets))

    inc: dict[str, int] = {rid: 0 for rid in ids}
    for a, b in edges:
        inc[a] += 1
        inc[b] += 1
    min_deg = min(inc.values())
    external = rng.choice(sorted(rid for rid, d in inc.items() if d == min_deg))

    level = max(1, round(n / cal["rooms_per_level"]))
    return SceneGraph3D(
        rooms=tuple(rooms),
        edges=make_edges(edges),
        external_doorways=(external,),
        context=context,
        difficulty=level,
    )


_ASSET_POOL = {
    "hospital": [
        ("hospital bed", (1.0, 2.1)), ("wheelchair", (0.7, 1.1)),
        ("iv stand", (0.5, 0.5)), ("medical cabinet", (0.9, 0.5)),
        ("visitor chair", (0.55, 0.55)), ("examination table", (0.8, 1.9)),
        ("supply cart", (0.6, 0.9)), ("waiting bench", (1.6, 0.6)),
    ],
    "residential": [
        ("sofa", (2.0, 0.9)), ("dining table", (1.6, 0.9)),
        ("chair", (0.5, 0.5)), ("double bed", (1.6, 2.0)),
        ("wardrobe", (1.2, 0.6)), ("bookshelf", (0.9, 0.35)),
        ("coffee table", (1.0, 0.6)), ("potted plant", (0.4, 0.4)),
    ],
    "office": [
        ("office desk", (1.4, 0.7)), ("office chair", (0.6, 0.6)),
        ("filing cabinet", (0.5, 0.6)), ("meeting table", (2.0, 1.0)),
        ("whiteboard", (1.5, 0.3)), ("printer stand", (0.7, 0.6)),
        ("bookshelf", (0.9, 0.35)), ("potted plant", (0.4, 0.4)),
    ],
    "generic": [
        ("table", (1.2, 0.8)), ("chair", (0.5, 0.5)),
        ("storage box", (0.6, 0.6)), ("shelf", (0.9, 0.35)),
        ("bench", (1.4, 0.5)), ("crate", (0.8, 0.8)),
    ],
}
_ASSET_COLORS = ["red", "blue", "green", "white", "black", "gray",
                 "oak-brown", "beige", "yellow"]


def _draw_asset(context: str, rng: random.Random) -> AssetSpec:
    pool = _ASSET_POOL.get(context, _ASSET_POOL["generic"])
    name, (w, d) = rng.choice(pool)
    jitter = rng.uniform(0.9, 1.1)
    return AssetSpec(
        description=name,
        size=(round(w * jitter, 3), round(d * jitter, 3), round(rng.uniform(0.4, 1.8), 3)),
        color=rng.choice(_ASSET_COLORS),
    )


# ---------------------------------------------------------------------------
# BSP floor-plan realization


def _split_leaves(bounds: Rect, n: int, rng: random.Random) -> list[Rect] | None:
    leaves: list[tuple[Rect, int]] = [(bounds, 0)]
    while len(leaves) < n:
        splittable = [
            (i, r, d) for i, (r, d) in enumerate(leaves)
            if max(r[2] - r[0], r[3] - r[1]) >= 2 * MIN_ROOM_SIDE
        ]
        if not splittable:
            return None
        # split the largest splittable leaf
        i, rect, d = max(splittable, key=lambda t: (t[1][2] - t[1][0]) * (t[1][3] - t[1][1]))
        x0, y0, x1, y1 = rect
        # splitting across the longer side keeps leaves square, which keeps
        # shared walls long enough to carry doorways
        prefer_x = (x1 - x0) >= (y1 - y0)
        can_x = (x1 - x0) >= 2 * MIN_ROOM_SIDE
        can_y = (y1 - y0) >= 2 * MIN_ROOM_SIDE
        axis_x = prefer_x if (can_x and can_y) else can_x
        if axis_x:
            lo, hi = x0, x1
        else:
            lo, hi = y0, y1
        pos = _snap(lo + (hi - lo) * rng.uniform(0.35, 0.65))
        pos = min(max(pos, lo + MIN_ROOM_SIDE), hi - MIN_ROOM_SIDE)
        pos = _snap(pos)
        if pos - lo < MIN_ROOM_SIDE - _TOL or hi - pos < MIN_ROOM_SIDE - _TOL:
            return None
        if axis_x:
            a, b = (x0, y0, pos, y1), (pos, y0, x1, y1)
        else:
            a, b = (x0, y0, x1, pos), (x0, pos, x1, y1)
        leaves[i] = (a, d + 1)
        leaves.append((b, d + 1))
    return [r for r, _ in leaves]


def _shared_wall(a: Rect, b: Rect) -> tuple[str, float, float, float] | None:
    """Shared wall between two rects: (axis, coord, lo, hi) or None.

    axis "x" means a vertical wall at x=coord spanning y in [lo, hi].
    """
    ax0, ay0, ax1, ay1 = a
    bx0, by0, bx1, by1 = b
    for coord_a, coord_b in ((ax1, bx0), (ax0, bx1)):
        if abs(coord_a - coord_b) < _TOL:
            lo, hi = max(ay0, by0), min(ay1, by1)
            if hi - lo >= _MIN_SHARED_WALL - _TOL:
                return ("x", coord_a, lo, hi)
    for coord_a, coord_b in ((ay1, by0), (ay0, by1)):
        if abs(coord_a - coord_b) < _TOL:
            lo, hi = max(ax0, bx0), min(ax1, bx1)
            if hi - lo >= _MIN_SHARED_WALL - _TOL:
                return ("y", coord_a, lo, hi)
    return None


def _touches_outer(rect: Rect, bounds: Rect) -> list[str]:
    """Sides of rect flush with the outer bounds ('W','E','S','N')."""
    x0, y0, x1, y1 = rect
    bx0, by0, bx1, by1 = bounds
    sides = []
    if abs(x0 - bx0) < _TOL:
        sides.append("W")
    if abs(x1 - bx1) < _TOL:
        sides.append("E")
    if abs(y0 - by0) < _TOL:
        sides.append("S")
    if abs(y1 - by1) < _TOL:
        sides.append("N")
    return sides


_MAX_TREE_CHILDREN = 3


def _spanning_tree(g: SceneGraph3D) -> tuple[str, dict[str, list[str]], list[str]]:
    """Low-degree, shallow spanning tree: (root, children, attach order).

    Grows Prim-style, attaching each room to the shallowest already-placed
    neighbour that still has fewer than three children (falling back to any
    neighbour when forced). Keeping fanout low makes the tree embeddable in
    the leaf adjacency graph, which rarely offers more than three or four
    free neighbours per leaf; keeping it shallow bounds the path diameter.
    """
    adj = g.adjacency()
    root = max(adj, key=lambda r: (len(adj[r]), r))
    order = [root]
    children: dict[str, list[str]] = {rid: [] for rid in adj}
    depth = {root: 0}
    seen = {root}
    while len(seen) < len(adj):
        frontier = [
            (node, nxt) for node in seen for nxt in adj[node] if nxt not in seen
        ]
        if not frontier:
            raise ValidationError("floor-plan synthesis requires a connected graph")
        capped = [e for e in frontier if len(children[e[0]]) < _MAX_TREE_CHILDREN]
        pool = capped or frontier
        node, nxt = min(pool, key=lambda e: (depth[e[0]], len(children[e[0]]), e))
        seen.add(nxt)
        children[node].append(nxt)
        depth[nxt] = depth[node] + 1
        order.append(nxt)
    return root, children, order


def _try_layout(g: SceneGraph3D, rng: random.Random,
                max_depth: int | None = None):
    """One layout attempt; returns (bounds, assignment, leaves, realized) or None."""
    n = len(g.rooms)
    area = AREA_PER_ROOM * n * rng.uniform(0.8, 1.2)
    aspect = rng.uniform(0.8, 1.25)
    w = max(_snap(math.sqrt(area * aspect)), MIN_ROOM_SIDE)
    h = max(_snap(area / w), MIN_ROOM_SIDE)
    bounds: Rect = (0.0, 0.0, w, h)
    leaves = _split_leaves(bounds, n, rng)
    if leaves is None:
        return None

    adj_leaf: dict[int, set[int]] = {i: set() for i in range(n)}
    for i in range(n):
        for j in range(i + 1, n):
            if _shared_wall(leaves[i], leaves[j]) is not None:
                adj_leaf[i].add(j)
                adj_leaf[j].add(i)

    assignment = _assign_rooms(g, leaves, adj_leaf, bounds, rng, max_depth)
    if assignment is None:
        return None
    realized = [
        (a, b) for a, b in g.edge_pairs()
        if assignment[b] in adj_leaf[assignment[a]]
    ]
    return bounds, assignment, leaves, realized


_ASSIGN_BUDGET = 6000


def _assign_rooms(g: SceneGraph3D, leaves: list[Rect],
                  adj_leaf: dict[int, set[int]], bounds: Rect,
                  rng: random.Random,
                  max_depth: int | None = None) -> dict[str, int] | None:
    """Map rooms onto leaves so the realized edge set stays connected.

    Grows the map one room at a time: a room becomes placeable once a
    graph neighbour is already placed, and its candidate leaves are the
    free leaves adjacent to such a neighbour's leaf — so each placement
    realizes at least one requested edge and the realized subgraph is a
    connected tree by construction. Most-constrained room first, with
    backtracking under a step budget; the caller restarts with a fresh
    BSP if the budget runs out.
    """
    n = len(g.rooms)
    externals = set(g.external_doorways)
    g_adj = g.adjacency()

    def boundary_ok(i: int) -> bool:
        x0, y0, x1, y1 = leaves[i]
        for s in _touches_outer(leaves[i], bounds):
            span = (x1 - x0) if s in ("S", "N") else (y1 - y0)
            if span >= _MIN_SHARED_WALL - _TOL:
                return True
        return False

    boundary_leaves = [i for i in range(n) if boundary_ok(i)]
    if externals and not boundary_leaves:
        return None

    assignment: dict[str, int] = {}
    room_at: dict[int, str] = {}
    used: set[int] = set()
    depth: dict[str, int] = {}
    steps = 0

    def free_components() -> list[set[int]]:
        free = [i for i in range(n) if i not in used]
        comps, seen = [], set()
        for start_leaf in free:
            if start_leaf in seen:
                continue
            comp = {start_leaf}
            queue = [start_leaf]
            while queue:
                cur = queue.pop()
                for j in adj_leaf[cur]:
                    if j not in used and j not in comp:
                        comp.add(j)
                        queue.append(j)
            seen |= comp
            comps.append(comp)
        return comps

    def pockets_reachable() -> bool:
        # every pocket of free leaves needs a bordering assigned room that
        # still has an unassigned graph neighbour, or it can never be filled
        for comp in free_components():
            ok = False
            for leaf in comp:
                for j in adj_leaf[leaf]:
                    r = room_at.get(j)
                    if r is not None and any(nb not in assignment for nb in g_adj[r]):
                        ok = True
                        break
                if ok:
                    break
            if not ok:
                return False
        return True

    def candidates(rid: str) -> set[int]:
        cand: set[int] = set()
        for nb in g_adj[rid]:
            if nb in assignment and (max_depth is None or depth[nb] < max_depth):
                cand.update(j for j in adj_leaf[assignment[nb]] if j not in used)
        if rid in externals:
            cand.intersection_update(boundary_leaves)
        return cand

    def order_candidates(rid: str, cand: set[int]) -> list[int]:
        bonus = {}
        attach = {}  # hop depth if placed here; shallow keeps diameter low
        for i in cand:
            nbs = [nb for nb in g_adj[rid]
                   if nb in assignment and assignment[nb] in adj_leaf[i]]
            bonus[i] = len(nbs)
            attach[i] = 1 + min(depth[nb] for nb in nbs)
        # taking a leaf that splits the free region tends to strand a pocket
        frag = {}
        for i in cand:
            used.add(i)
            frag[i] = len(free_components())
            used.discard(i)
        return sorted(cand, key=lambda i: (frag[i], -bonus[i], attach[i], rng.random()))

    def place() -> bool:
        nonlocal steps
        if len(assignment) == n:
            return True
        steps += 1
        if steps > _ASSIGN_BUDGET:
            return False
        frontier = [rid for rid in g_adj
                    if rid not in assignment
                    and any(nb in assignment for nb in g_adj[rid])]
        # rooms with no candidate leaf yet simply wait: their options can
        # grow as further neighbours get placed
        options = {rid: c for rid in frontier if (c := candidates(rid))}
        if not options:
            return False
        rid = min(options, key=lambda r: (len(options[r]), r))
        for i in order_candidates(rid, options[rid]):
            assignment[rid] = i
            room_at[i] = rid
            used.add(i)
            depth[rid] = 1 + min(depth[nb] for nb in g_adj[rid]
                                 if nb in assignment and assignment[nb] in adj_leaf[i])
            if pockets_reachable() and place():
                return True
            del assignment[rid]
            del room_at[i]
            del depth[rid]
            used.discard(i)
        return False

    # growing from a high-degree room keeps the realized tree shallow;
    # external rooms get their boundary leaves during normal growth
    start = max(g_adj, key=lambda r: (len(g_adj[r]), r))
    start_leaves = boundary_leaves if start in externals else list(range(n))
    depth[start] = 0
    for i in sorted(start_leaves, key=lambda _: rng.random()):
        assignment[start] = i
        room_at[i] = start
        used.add(i)
        if place():
            return assignment
        del assignment[start]
        del room_at[i]
        used.discard(i)
    return None


def _place_external_doors(g: SceneGraph3D, assignment: dict[str, int],
                          leaves: list[Rect], bounds: Rect) -> list[Doorway] | None:
    doors: list[Doorway] = []
    by_room: dict[str, int] = {}
    for rid in g.external_doorways:
        by_room[rid] = by_room.get(rid, 0) + 1
    for rid, count in sorted(by_room.items()):
        rect = leaves[assignment[rid]]
        x0, y0, x1, y1 = rect
        sides = [
            s for s in _touches_outer(rect, bounds)
            if ((x1 - x0) if s in ("S", "N") else (y1 - y0)) >= _MIN_SHARED_WALL
        ]
        if not sides:
            return None
        per_side: dict[str, int] = {s: 0 for s in sides}
        for k in range(count):
            per_side[sides[k % len(sides)]] += 1
        for side, m in per_side.items():
            span = (x1 - x0) if side in ("S", "N") else (y1 - y0)
            # doors on one wall must not overlap each other or the corners
            if span < m * _MIN_SHARED_WALL:
                return None
            for j in range(m):
                frac = (j + 1) / (m + 1)
                if side in ("S", "N"):
                    c = x0 + frac * (x1 - x0)
                    yy = y0 if side == "S" else y1
                    a, b = (c - DOOR_WIDTH / 2, yy), (c + DOOR_WIDTH / 2, yy)
                else:
                    c = y0 + frac * (y1 - y0)
                    xx = x0 if side == "W" else x1
                    a, b = (xx, c - DOOR_WIDTH / 2), (xx, c + DOOR_WIDTH / 2)
                doors.append(Doorway(a=a, b=b, width=DOOR_WIDTH,
                                     kind="external", rooms=(rid,)))
    return doors


def _allocate_zones(room: FloorPlanRoom, assets: tuple[AssetSpec, ...],
                    doorways: list[Doorway], rng: random.Random
                    ) -> tuple[list[AssetZone], list[int]]:
    x0, y0, x1, y1 = geo.polygon_bounds(room.polygon)
    ex0, ey0 = x0 + ZONE_CLEARANCE, y0 + ZONE_CLEARANCE
    ex1, ey1 = x1 - ZONE_CLEARANCE, y1 - ZONE_CLEARANCE

    blocked: list[Rect] = []
    for d in doorways:
        if room.room_id not in d.rooms:
            continue
        (ax, ay), (bx, by) = d.a, d.b
        if abs(ax - bx) < _TOL:  # vertical doorway -> horizontal swing
            lo, hi = min(ay, by), max(ay, by)
            sx0 = ax - DOOR_SWING if ax > (x0 + x1) / 2 else ax
            blocked.append((sx0, lo, sx0 + DOOR_SWING, hi))
        else:
            lo, hi = min(ax, bx), max(ax, bx)
            sy0 = ay - DOOR_SWING if ay > (y0 + y1) / 2 else ay
            blocked.append((lo, sy0, hi, sy0 + DOOR_SWING))

    placed: list[Rect] = []
    zones: list[AssetZone] = []
    failed: list[int] = []

    def overlaps(r: Rect, others: list[Rect]) -> bool:
        rx0, ry0, rx1, ry1 = r
        for ox0, oy0, ox1, oy1 in others:
            if min(rx1, ox1) - max(rx0, ox0) > _TOL and min(ry1, oy1) - max(ry0, oy0) > _TOL:
                return True
        return False

    for idx, spec in enumerate(assets):
        zw, zd = spec.size[0] + ZONE_MARGIN, spec.size[1] + ZONE_MARGIN
        spot = None
        for w, d in ((zw, zd), (zd, zw)):
            if w > ex1 - ex0 + _TOL or d > ey1 - ey0 + _TOL:
                continue
            ny = int((ey1 - ey0 - d) / RESOLUTION) + 1
            nx = int((ex1 - ex0 - w) / RESOLUTION) + 1
            for iy in range(ny):
                py = ey0 + iy * RESOLUTION
                for ix in range(nx):
                    px = ex0 + ix * RESOLUTION
                    cand = (px, py, px + w, py + d)
                    if not overlaps(cand, blocked) and not overlaps(cand, placed):
                        spot = cand
                        break
                if spot:
                    break
            if spot:
                break
        if spot is None:
            failed.append(idx)
            continue
        placed.append(spot)
        zones.append(AssetZone(
            room_id=room.room_id,
            polygon=tuple(geo.rect_polygon(*spot)),
            asset_index=idx,
            spec=spec,
        ))
    return zones, failed


def _hop_diameter(edges: list[tuple[str, str]], n: int) -> int:
    """Longest shortest path (in hops) of the realized edge set."""
    adj: dict[str, set[str]] = {}
    for a, b in edges:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    if len(adj) < n:
        return n  # isolated room; treat as worst case
    worst = 0
    for src in adj:
        dist = {src: 0}
        queue = [src]
        while queue:
            node = queue.pop(0)
            for nxt in adj[node]:
                if nxt not in dist:
                    dist[nxt] = dist[node] + 1
                    queue.append(nxt)
        if len(dist) < len(adj):
            return n
        worst = max(worst, max(dist.values()))
    return worst


def synthesize_floorplan(g: SceneGraph3D, rng: random.Random) -> FloorPlan:
    """Realize a connected graph as a rectilinear floor plan.

    Restarts the BSP + room assignment up to MAX_RESTARTS times to realize
    every graph edge on a shared wall; if some extra edges stay geometrically
    non-adjacent they are dropped and reported. Raises LayoutFailure only
    when no attempt can realize the spanning tree at all.
    """
    if not compute_graph_metrics(g).connected:
        raise ValidationError("requested graph is disconnected")
    target_edges = len(g.edges)
    n = len(g.rooms)
    diam_bound = (n + 1) // 2

    def _quality(attempt) -> tuple:
        dist = _hop_diameter(attempt[3], n)
        return (dist <= diam_bound, len(attempt[3]), -dist)

    best = None
    best_q = None
    for trial in range(MAX_RESTARTS):
        attempt = _try_layout(g, rng)
        if attempt is None:
            continue
        ext = _place_external_doors(g, attempt[1], attempt[2], attempt[0])
        if ext is None:
            continue
        q = _quality(attempt)
        if best is None or q > best_q:
            best, best_q = (attempt, ext), q
        if best_q[0] and len(best[0][3]) == target_edges:
            break
        # good enough after a few tries: a compact spanning tree plus an
        # extra edge; remaining restarts rarely improve on it
        if trial >= 2 and best_q[0] and len(best[0][3]) >= min(n, target_edges):
            break
        if trial >= 9 and best_q[0]:
            break
    if best is not None and not best_q[0]:
        # free growth came out too stringy; retry with a hard cap on the
        # attachment depth, which bounds the path diameter by construction
        for _ in range(MAX_RESTARTS):
            attempt = _try_layout(g, rng, max_depth=max(1, diam_bound // 2))
            if attempt is None:
                continue
            ext = _place_external_doors(g, attempt[1], attempt[2], attempt[0])
            if ext is None:
                continue
            q = _quality(attempt)
            if q > best_q:
                best, best_q = (attempt, ext), q
            if best_q[0] and len(best[0][3]) >= min(n, target_edges):
                break
    if best is None:
        raise LayoutFailure(
            f"could not realize spanning tree after {MAX_RESTARTS} restarts "
            f"(rooms={len(g.rooms)}, edges={target_edges})"
        )
    (bounds, assignment, leaves, realized), ext_doors = best

    # round everything to the serialized precision so that bundles
    # round-trip byte-exactly (all coordinates sit on the 5 cm grid)
    def r3(pt):
        return (round(pt[0], 3), round(pt[1], 3))

    bounds = tuple(round(v, 3) for v in bounds)
    rooms = tuple(
        FloorPlanRoom(
            room_id=r.id,
            polygon=tuple(r3(p) for p in geo.rect_polygon(*leaves[assignment[r.id]])),
            category=r.category,
        )
        for r in sorted(g.rooms, key=lambda r: r.id)
    )

    doorways: list[Doorway] = []
    for a, b in realized:
        wall = _shared_wall(leaves[assignment[a]], leaves[assignment[b]])
        assert wall is not None
        axis, coord, lo, hi = wall
        center = (lo + hi) / 2
        if axis == "x":
            pa, pb = (coord, center - DOOR_WIDTH / 2), (coord, center + DOOR_WIDTH / 2)
        else:
            pa, pb = (center - DOOR_WIDTH / 2, coord), (center + DOOR_WIDTH / 2, coord)
        doorways.append(Doorway(a=r3(pa), b=r3(pb), width=DOOR_WIDTH,
                                kind="inter_room", rooms=(a, b)))
    doorways.extend(
        Doorway(a=r3(d.a), b=r3(d.b), width=d.width, kind=d.kind, rooms=d.rooms)
        for d in ext_doors
    )

    zones: list[AssetZone] = []
    unallocated: list[tuple[str, int]] = []
    for room in rooms:
        src = g.room(room.room_id)
        zs, failed = _allocate_zones(room, src.assets, doorways, rng)
        zones.extend(
            AssetZone(room_id=z.room_id, polygon=tuple(r3(p) for p in z.polygon),
                      asset_index=z.asset_index, spec=z.spec)
            for z in zs
        )
        unallocated.extend((room.room_id, i) for i in failed)

    dropped = tuple(e for e in g.edge_pairs() if e not in realized)
    return FloorPlan(
        resolution=RESOLUTION,
        bounds=bounds,
        rooms=rooms,
        doorways=tuple(doorways),
        zones=tuple(zones),
        context=g.context,
        difficulty=g.difficulty,
        dropped_edges=dropped,
        unallocated_zones=tuple(unallocated),
    )


def realized_graph(fp: FloorPlan) -> SceneGraph3D:
    """The graph actually realized in geometry; metrics run on this."""
    zone_specs: dict[str, list[AssetSpec]] = {r.room_id: [] for r in fp.rooms}
    for z in sorted(fp.zones, key=lambda z: (z.room_id, z.asset_index)):
        zone_specs[z.room_id].append(z.spec)
    rooms = tuple(
        RoomNode(id=r.room_id, category=r.category, assets=tuple(zone_specs[r.room_id]))
        for r in fp.rooms
    )
    edges = {tuple(sorted(d.rooms)) for d in fp.doorways if d.kind == "inter_room"}
    externals = tuple(sorted(d.rooms[0] for d in fp.doorways if d.kind == "external"))
    return SceneGraph3D(
        rooms=rooms,
        edges=make_edges(edges),
        external_doorways=externals,
        context=fp.context,
        difficulty=fp.difficulty,
    )


# ---------------------------------------------------------------------------
# Serialization


def _pt(p: geo.Point) -> list[float]:
    return [round(p[0], 3), round(p[1], 3)]


def floorplan_to_dict(fp: FloorPlan) -> dict:
    return {
        "resolution": fp.resolution,
        "bounds": [round(v, 3) for v in fp.bounds],
        "context": fp.context,
        "difficulty": fp.difficulty,
        "rooms": [
            {
                "id": r.room_id,
                "category": r.category,
                "polygon": [_pt(p) for p in r.polygon],
            }
            for r in sorted(fp.rooms, key=lambda r: r.room_id)
        ],
        "doorways": [
            {
                "a": _pt(d.a),
                "b": _pt(d.b),
                "width": round(d.width, 3),
                "kind": d.kind,
                "rooms": list(d.rooms),
            }
            for d in sorted(fp.doorways, key=lambda d: (d.kind, d.rooms, d.a))
        ],
        "zones": [
            {
                "room_id": z.room_id,
                "asset_index": z.asset_index,
                "polygon": [_pt(p) for p in z.polygon],
                "spec": {
                    "description": z.spec.description,
                    "size": [round(s, 3) for s in z.spec.size],
                    "color": z.spec.color,
                },
            }
            for z in sorted(fp.zones, key=lambda z: (z.room_id, z.asset_index))
        ],
        "dropped_edges": [list(e) for e in sorted(fp.dropped_edges)],
        "unallocated_zones": [list(u) for u in sorted(fp.unallocated_zones)],
    }


def serialize_floorplan(fp: FloorPlan) -> bytes:
    return (json.dumps(floorplan_to_dict(fp), indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def floorplan_from_dict(doc: dict) -> FloorPlan:
    rooms = tuple(
        FloorPlanRoom(
            room_id=r["id"],
            polygon=tuple((float(x), float(y)) for x, y in r["polygon"]),
            category=r["category"],
        )
        for r in doc["rooms"]
    )
    doorways = tuple(
        Doorway(
            a=(float(d["a"][0]), float(d["a"][1])),
            b=(float(d["b"][0]), float(d["b"][1])),
            width=float(d["width"]),
            kind=d["kind"],
            rooms=tuple(d["rooms"]),
        )
        for d in doc["doorways"]
    )
    zones = tuple(
        AssetZone(
            room_id=z["room_id"],
            polygon=tuple((float(x), float(y)) for x, y in z["polygon"]),
            asset_index=int(z["asset_index"]),
            spec=AssetSpec(
                description=z["spec"]["description"],
                size=tuple(float(s) for s in z["spec"]["size"]),
                color=z["spec"]["color"],
            ),
        )
        for z in doc["zones"]
    )
    return FloorPlan(
        resolution=float(doc["resolution"]),
        bounds=tuple(float(v) for v in doc["bounds"]),
        rooms=rooms,
        doorways=doorways,
        zones=zones,
        context=doc["context"],
        difficulty=int(doc["difficulty"]),
        dropped_edges=tuple(tuple(e) for e in doc.get("dropped_edges", [])),
        unallocated_zones=tuple((u[0], int(u[1])) for u in doc.get("unallocated_zones", [])),
    )


def parse_floorplan(data: bytes | str) -> FloorPlan:
    return floorplan_from_dict(json.loads(data))
