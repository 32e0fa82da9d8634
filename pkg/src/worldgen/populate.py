"""Population stage: pick a model per asset zone and fit it in.

select_model queries the database with the asset's description and color
under hard filters; fit_into_zone is a greedy bottom-left packer over a
5 cm grid with the four right-angle rotations. Zones are pairwise disjoint
by construction, so collisions can only occur within a zone; a global
cross-check runs anyway.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from . import geometry as geo
from .errors import NoMatch
from .layout import RESOLUTION, FloorPlan
from .modeldb import ModelBundle, ModelRecord, QueryFilter, query
from .scenegraph import AssetSpec, SceneGraph3D

FOOTPRINT_TOLERANCE = 1.25  # model may exceed the spec footprint by this factor
_TOL = 1e-9


@dataclass(frozen=True)
class Placement:
    model_id: str
    position: geo.Point
    rotation: int  # degrees, one of 0/90/180/270
    world_hull: tuple[geo.Point, ...]
    room_id: str
    asset_index: int


@dataclass
class PopulationReport:
    no_match: list[tuple[str, int]] = field(default_factory=list)
    unfit: list[tuple[str, int]] = field(default_factory=list)
    dbquery_ms: float = 0.0
    fit_ms: float = 0.0


def select_model(db: ModelBundle, spec: AssetSpec, room_category: str,
                 rng: random.Random,
                 max_footprint: tuple[float, float] | None = None) -> ModelRecord:
    """Query for a model matching the spec; weighted pick among the top 3.

    Raises NoMatch when the filters admit nothing; the caller substitutes a
    generic box of the spec's size.
    """
    known = any(room_category in rec.room_affinity for rec in db.records.values())
    limit = (spec.size[0] * FOOTPRINT_TOLERANCE, spec.size[1] * FOOTPRINT_TOLERANCE)
    if max_footprint is not None:
        limit = (min(limit[0], max_footprint[0]), min(limit[1], max_footprint[1]))
    qfilter = QueryFilter(
        room_category=room_category if known else None,
        max_footprint=limit,
    )
    hits = query(db, f"{spec.description} {spec.color}", qfilter, k=3)
    if not hits:
        raise NoMatch(f"no model for {spec.description!r} in {room_category!r}")
    weights = [max(score, 0.0) + 1e-6 for _, score in hits]
    return rng.choices([rec for rec, _ in hits], weights=weights, k=1)[0]


def generic_box_record(spec: AssetSpec) -> ModelRecord:
    """Fallback model: a parametric box with the spec's exact footprint."""
    w, d, h = spec.size
    return ModelRecord(
        id="generic-box",
        description=f"generic box {spec.description}",
        footprint_hull=tuple(geo.rect_polygon(-w / 2, -d / 2, w / 2, d / 2)),
        height=h,
        color_materials=((spec.color, "generic"),),
        room_affinity={},
        tags=("generic",),
        payload_ref="",
    )


@dataclass
class FitResult:
    poses: list[tuple[geo.Point, int] | None]  # per input hull
    unfit: list[int]


def hulls_intersect(a, b) -> bool:
    """Interior intersection of two convex CCW polygons (separating axis)."""
    return geo.hulls_intersect(a, b)


def fit_into_zone(zone: list[geo.Point] | tuple[geo.Point, ...],
                  hulls: list[list[geo.Point]],
                  rng: random.Random,
                  occupied: list[tuple[geo.Point, ...]] | None = None) -> FitResult:
    """Greedy bottom-left: first feasible grid point in (y, x) scan order.

    Rotation order is rng-shuffled per hull. Unplaceable hulls are reported,
    never dropped silently.
    """
    zone = list(zone)
    zx0, zy0, zx1, zy1 = geo.polygon_bounds(zone)
    rect_zone = len(zone) == 4 and all(
        abs(zone[i][0] - zone[(i + 1) % 4][0]) < _TOL
        or abs(zone[i][1] - zone[(i + 1) % 4][1]) < _TOL
        for i in range(4)
    )
    placed: list[tuple[geo.Point, ...]] = list(occupied or [])
    placed_boxes = [geo.polygon_bounds(p) for p in placed]
    poses: list[tuple[geo.Point, int] | None] = []
    unfit: list[int] = []

    for idx, hull in enumerate(hulls):
        rotations = [0, 90, 180, 270]
        rng.shuffle(rotations)
        variants = []
        for rot in rotations:
            base = geo.transform_hull(hull, rot, 0.0, 0.0)
            bx0, by0, bx1, by1 = geo.polygon_bounds(base)
            variants.append((rot, base, bx0, by0, bx1 - bx0, by1 - by0))
        found = None
        ny = int(round((zy1 - zy0) / RESOLUTION)) + 1
        nx = int(round((zx1 - zx0) / RESOLUTION)) + 1
        for iy in range(ny):
            py = zy0 + iy * RESOLUTION
            for ix in range(nx):
                px = zx0 + ix * RESOLUTION
                for rot, base, bx0, by0, bw, bh in variants:
                    if px + bw > zx1 + _TOL or py + bh > zy1 + _TOL:
                        continue
                    tx, ty = px - bx0, py - by0
                    world = [(x + tx, y + ty) for x, y in base]
                    if not rect_zone and not geo.polygon_contains_polygon(zone, world):
                        continue
                    hit = False
                    for other, (ox0, oy0, ox1, oy1) in zip(placed, placed_boxes):
                        if (min(px + bw, ox1) - max(px, ox0) > _TOL
                                and min(py + bh, oy1) - max(py, oy0) > _TOL
                                and geo.hulls_intersect(world, other)):
                            hit = True
                            break
                    if hit:
                        continue
                    found = ((tx, ty), rot, tuple(world))
                    break
                if found:
                    break
            if found:
                break
        if found is None:
            poses.append(None)
            unfit.append(idx)
        else:
            pos, rot, world = found
            poses.append((pos, rot))
            placed.append(world)
            placed_boxes.append(geo.polygon_bounds(world))
    return FitResult(poses=poses, unfit=unfit)


def place_assets(fp: FloorPlan, g: SceneGraph3D, db: ModelBundle,
                 rng: random.Random) -> tuple[list[Placement], PopulationReport]:
    """Fill every asset zone; returns placements plus the quality report."""
    report = PopulationReport()
    placements: list[Placement] = []
    categories = {r.room_id: r.category for r in fp.rooms}

    for zone in sorted(fp.zones, key=lambda z: (z.room_id, z.asset_index)):
        zx0, zy0, zx1, zy1 = geo.polygon_bounds(zone.polygon)
        zone_limit = (zx1 - zx0 - 0.02, zy1 - zy0 - 0.02)
        t0 = time.perf_counter()
        try:
            rec = select_model(db, zone.spec, categories[zone.room_id], rng,
                               max_footprint=zone_limit)
        except NoMatch:
            report.no_match.append((zone.room_id, zone.asset_index))
            rec = generic_box_record(zone.spec)
        t1 = time.perf_counter()
        fit = fit_into_zone(list(zone.polygon), [list(rec.footprint_hull)], rng)
        report.dbquery_ms += (t1 - t0) * 1000.0
        report.fit_ms += (time.perf_counter() - t1) * 1000.0
        if fit.unfit:
            report.unfit.append((zone.room_id, zone.asset_index))
            continue
        (pos, rot) = fit.poses[0]
        # round to the serialized precision so bundles round-trip exactly
        world = tuple((round(x, 3), round(y, 3)) for x, y in
                      geo.transform_hull(rec.footprint_hull, rot, pos[0], pos[1]))
        placements.append(Placement(
            model_id=rec.id,
            position=(round(pos[0], 3), round(pos[1], 3)),
            rotation=rot,
            world_hull=world,
            room_id=zone.room_id,
            asset_index=zone.asset_index,
        ))

    _assert_disjoint(placements)
    return placements, report


def _assert_disjoint(placements: list[Placement]) -> None:
    """Zones are disjoint so this should never fire; cheap AABB prefilter."""
    boxes = [geo.polygon_bounds(p.world_hull) for p in placements]
    for i in range(len(placements)):
        x0, y0, x1, y1 = boxes[i]
        for j in range(i + 1, len(placements)):
            u0, v0, u1, v1 = boxes[j]
            if min(x1, u1) - max(x0, u0) <= 0 or min(y1, v1) - max(y0, v0) <= 0:
                continue
            if geo.hulls_intersect(placements[i].world_hull, placements[j].world_hull):
                raise AssertionError(
                    f"placement overlap: {placements[i].model_id} vs {placements[j].model_id}"
                )
