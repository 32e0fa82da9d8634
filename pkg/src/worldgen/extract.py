"""Scene-graph extraction from pre-segmented floor-plan annotations.

Input is a segmentation annotation (room polygons, asset boxes, doorway
segments); output is a validated scene graph. The four steps: re-categorize
and filter assets, classify doorways as inter-room or external, build room
connectivity from inter-room doorways, assign remaining assets to their
containing room.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from . import geometry as geo
from .errors import AmbiguousDoorway, OrphanAsset, SchemaError, ValidationError
from .scenegraph import AssetSpec, RoomNode, SceneGraph3D, make_edges

DOORWAY_WALL_TOLERANCE = 0.05  # meters; doorway-to-boundary match distance
_SEGMENT_SAMPLES = 5


@dataclass(frozen=True)
class RoomPolygon:
    id: str
    category: str
    polygon: tuple[geo.Point, ...]


@dataclass(frozen=True)
class AssetBox:
    category: str
    box: tuple[float, float, float, float]  # x0, y0, x1, y1
    color: str | None = None

    @property
    def centroid(self) -> geo.Point:
        x0, y0, x1, y1 = self.box
        return (x0 + x1) / 2.0, (y0 + y1) / 2.0

    @property
    def extent(self) -> tuple[float, float]:
        x0, y0, x1, y1 = self.box
        return x1 - x0, y1 - y0


@dataclass(frozen=True)
class DoorwaySegment:
    a: geo.Point
    b: geo.Point
    width: float


@dataclass(frozen=True)
class SegmentationAnnotation:
    room_polygons: tuple[RoomPolygon, ...]
    asset_boxes: tuple[AssetBox, ...]
    doorway_segments: tuple[DoorwaySegment, ...]
    context: str = "generic"


@dataclass(frozen=True)
class ClassifiedDoorway:
    segment: DoorwaySegment
    kind: str  # "inter_room" | "external"
    rooms: tuple[str, ...]  # 2 ids for inter_room, 1 for external


def annotation_from_dict(doc: dict) -> SegmentationAnnotation:
    try:
        rooms = tuple(
            RoomPolygon(
                id=str(r["id"]),
                category=str(r["category"]),
                polygon=tuple((float(x), float(y)) for x, y in r["polygon"]),
            )
            for r in doc["rooms"]
        )
        boxes = tuple(
            AssetBox(
                category=str(b["category"]),
                box=tuple(float(v) for v in b["box"]),
                color=str(b["color"]) if b.get("color") is not None else None,
            )
            for b in doc.get("assets", [])
        )
        doors = tuple(
            DoorwaySegment(
                a=(float(d["a"][0]), float(d["a"][1])),
                b=(float(d["b"][0]), float(d["b"][1])),
                width=float(d.get("width", 0.9)),
            )
            for d in doc.get("doorways", [])
        )
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise SchemaError(f"malformed annotation: {exc!r}") from exc
    return SegmentationAnnotation(
        room_polygons=rooms,
        asset_boxes=boxes,
        doorway_segments=doors,
        context=str(doc.get("context", "generic")),
    )


def parse_annotation(data: bytes | str) -> SegmentationAnnotation:
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return annotation_from_dict(doc)


def load_default_category_map() -> dict:
    """The bundled raw-token -> template map; users may override entries."""
    text = resources.files("worldgen.data").joinpath("category_map.json").read_text("utf-8")
    return json.loads(text)


def _segment_near_boundary(seg: DoorwaySegment, poly: tuple[geo.Point, ...],
                           tol: float) -> bool:
    ax, ay = seg.a
    bx, by = seg.b
    for i in range(_SEGMENT_SAMPLES):
        t = i / (_SEGMENT_SAMPLES - 1)
        pt = (ax + t * (bx - ax), ay + t * (by - ay))
        if geo.point_polygon_boundary_distance(pt, poly) > tol:
            return False
    return True


def classify_doorways(seg: SegmentationAnnotation,
                      tol: float = DOORWAY_WALL_TOLERANCE) -> list[ClassifiedDoorway]:
    """Match each doorway segment against room boundaries.

    Exactly two matching rooms -> inter-room; exactly one -> external;
    anything else raises AmbiguousDoorway.
    """
    out: list[ClassifiedDoorway] = []
    for d in seg.doorway_segments:
        near = [rp.id for rp in seg.room_polygons
                if _segment_near_boundary(d, rp.polygon, tol)]
        if len(near) == 2:
            out.append(ClassifiedDoorway(d, "inter_room", (near[0], near[1])))
        elif len(near) == 1:
            out.append(ClassifiedDoorway(d, "external", (near[0],)))
        else:
            raise AmbiguousDoorway(
                f"doorway {d.a}->{d.b} matches {len(near)} room boundaries: {sorted(near)}"
            )
    return out


def extract_scene_graph(seg: SegmentationAnnotation, category_map: dict,
                        tol: float = DOORWAY_WALL_TOLERANCE) -> SceneGraph3D:
    """Convert a segmentation annotation into a validated scene graph."""
    present = {b.category for b in seg.asset_boxes}
    unknown = sorted(present - set(category_map))
    if unknown:
        raise ValidationError(f"category map does not cover tokens: {unknown}")

    if not seg.room_polygons:
        raise ValidationError("annotation has no rooms")
    doorways = classify_doorways(seg, tol)
    edges = {tuple(sorted(d.rooms)) for d in doorways if d.kind == "inter_room"}
    externals = [d.rooms[0] for d in doorways if d.kind == "external"]

    room_assets: dict[str, list[AssetSpec]] = {rp.id: [] for rp in seg.room_polygons}
    for box in seg.asset_boxes:
        template = category_map[box.category]
        if template == "DROP":
            continue
        host = None
        for rp in seg.room_polygons:
            if geo.point_in_polygon(box.centroid, rp.polygon):
                host = rp.id
                break
        if host is None:
            raise OrphanAsset(f"asset box {box.box} ({box.category}) inside no room")
        w, d = box.extent
        room_assets[host].append(AssetSpec(
            description=str(template["description"]),
            size=(w, d, float(template["height"])),
            color=box.color or str(template.get("color", "gray")),
        ))

    rooms = tuple(
        RoomNode(id=rp.id, category=rp.category, assets=tuple(room_assets[rp.id]))
        for rp in sorted(seg.room_polygons, key=lambda r: r.id)
    )
    if not externals:
        # Real plans always have an entrance; annotations that omit it get a
        # default external door on the first room so the graph validates.
        externals = [rooms[0].id]
    return SceneGraph3D(
        rooms=rooms,
        edges=make_edges(edges),
        external_doorways=tuple(sorted(externals)),
        context=seg.context,
        difficulty=max(1, round(len(rooms) / 3)),
    )
