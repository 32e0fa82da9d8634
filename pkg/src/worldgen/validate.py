"""Independent geometric and graph validation of a finished world.

Used by the `validate` CLI command and the acceptance suite. When shapely is
available the polygon checks run on its clipping engine (an implementation
independent of the generator's own geometry); otherwise a plain fallback is
used.
"""

from __future__ import annotations

import math
from pathlib import Path

from . import geometry as geo
from .export import WorldBundle, parse_pgm, read_world_bundle
from .layout import ZONE_CLEARANCE
from .scenario import AGENT_CLEARANCE
from .scenegraph import compute_graph_metrics

try:
    from shapely.geometry import Polygon as _ShapelyPolygon

    HAVE_SHAPELY = True
except ImportError:  # pragma: no cover
    HAVE_SHAPELY = False

_AREA_TOL = 1e-9
_DIST_TOL = 1e-3


def _poly(points):
    return _ShapelyPolygon(points)


def _interiors_overlap(a, b) -> bool:
    if HAVE_SHAPELY:
        return _poly(a).intersection(_poly(b)).area > _AREA_TOL
    return geo.hulls_intersect(list(a), list(b))


def _contains(outer, inner, slack: float = 1e-6) -> bool:
    if HAVE_SHAPELY:
        return _poly(outer).buffer(slack).contains(_poly(inner))
    return geo.polygon_contains_polygon(list(outer), list(inner))


def validate_world(world: WorldBundle) -> list[str]:
    """Returns a list of violation descriptions; empty means valid."""
    violations: list[str] = []
    fp = world.floorplan

    rooms = sorted(fp.rooms, key=lambda r: r.room_id)
    for i in range(len(rooms)):
        for j in range(i + 1, len(rooms)):
            if _interiors_overlap(rooms[i].polygon, rooms[j].polygon):
                violations.append(
                    f"room overlap: {rooms[i].room_id} / {rooms[j].room_id}")

    bx0, by0, bx1, by1 = fp.bounds
    bounds_poly = geo.rect_polygon(bx0, by0, bx1, by1)
    for r in rooms:
        if not _contains(bounds_poly, r.polygon):
            violations.append(f"room {r.room_id} outside bounds")

    by_room = {r.room_id: r for r in rooms}
    for d in fp.doorways:
        seg_len = math.hypot(d.a[0] - d.b[0], d.a[1] - d.b[1])
        if seg_len < d.width - _DIST_TOL:
            violations.append(f"doorway shorter than width: {d}")
        for rid in d.rooms:
            poly = by_room[rid].polygon
            mid = ((d.a[0] + d.b[0]) / 2, (d.a[1] + d.b[1]) / 2)
            for pt in (d.a, d.b, mid):
                if geo.point_polygon_boundary_distance(pt, poly) > _DIST_TOL:
                    violations.append(
                        f"doorway {d.kind} {d.rooms} not on wall of {rid}")
                    break
        if d.kind == "external":
            mid = ((d.a[0] + d.b[0]) / 2, (d.a[1] + d.b[1]) / 2)
            if geo.point_polygon_boundary_distance(mid, bounds_poly) > _DIST_TOL:
                violations.append(f"external doorway {d.rooms} not on outer boundary")

    zones_by_room: dict[str, list] = {}
    for z in fp.zones:
        zones_by_room.setdefault(z.room_id, []).append(z)
    for rid, zones in zones_by_room.items():
        rx0, ry0, rx1, ry1 = geo.polygon_bounds(by_room[rid].polygon)
        c = ZONE_CLEARANCE - _DIST_TOL
        eroded = geo.rect_polygon(rx0 + c, ry0 + c, rx1 - c, ry1 - c)
        for z in zones:
            if not _contains(eroded, z.polygon):
                violations.append(f"zone outside eroded room {rid}#{z.asset_index}")
        for i in range(len(zones)):
            for j in range(i + 1, len(zones)):
                if _interiors_overlap(zones[i].polygon, zones[j].polygon):
                    violations.append(
                        f"zone overlap in {rid}: #{zones[i].asset_index}/#{zones[j].asset_index}")

    zone_index = {(z.room_id, z.asset_index): z for z in fp.zones}
    placements = list(world.placements)
    for p in placements:
        z = zone_index.get((p.room_id, p.asset_index))
        if z is None:
            violations.append(f"placement without zone: {p.model_id} in {p.room_id}")
        elif not _contains(z.polygon, p.world_hull):
            violations.append(
                f"placement outside zone: {p.model_id} in {p.room_id}#{p.asset_index}")
    for i in range(len(placements)):
        for j in range(i + 1, len(placements)):
            if _interiors_overlap(placements[i].world_hull, placements[j].world_hull):
                violations.append(
                    f"placement overlap: {placements[i].model_id}/{placements[j].model_id}")

    hulls = [list(p.world_hull) for p in placements]
    clearance = AGENT_CLEARANCE - _DIST_TOL
    for a in world.agents:
        for pt in (a.spawn, *a.goals):
            host = next((r for r in rooms
                         if geo.point_in_polygon(pt, r.polygon, include_boundary=False)), None)
            if host is None:
                violations.append(f"agent {a.id}: point {pt} inside no room")
                continue
            if geo.point_polygon_boundary_distance(pt, host.polygon) < clearance:
                violations.append(f"agent {a.id}: point {pt} too close to wall")
            if any(geo.point_solid_distance(pt, h) < clearance for h in hulls):
                violations.append(f"agent {a.id}: point {pt} too close to an obstacle")

    realized = world.realized
    m = compute_graph_metrics(realized)
    if not m.connected:
        violations.append("realized graph disconnected")
    graph_edges = set(world.scene_graph.edge_pairs())
    for e in realized.edge_pairs():
        if e not in graph_edges:
            violations.append(f"realized edge {e} absent from requested graph")
    return violations


def validate_bundle_dir(path: str | Path) -> list[str]:
    path = Path(path)
    world = read_world_bundle(path)
    violations = validate_world(world)
    grid = parse_pgm((path / "map.pgm").read_bytes())
    bad = set(int(v) for v in set(grid.flatten())) - {0, 205, 254}
    if bad:
        violations.append(f"occupancy grid has foreign values {sorted(bad)}")
    return violations
