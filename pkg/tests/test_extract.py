"""Segmentation -> scene-graph extraction, checked against a brute-force
geometric adjacency oracle that re-derives room adjacency from the raw
polygons and doorway segments with shapely distances."""

import math

import pytest
from shapely.geometry import LineString, Polygon as ShapelyPolygon

from worldgen.errors import AmbiguousDoorway, OrphanAsset, ValidationError
from worldgen.extract import (
    DOORWAY_WALL_TOLERANCE,
    AssetBox,
    DoorwaySegment,
    RoomPolygon,
    SegmentationAnnotation,
    annotation_from_dict,
    classify_doorways,
    extract_scene_graph,
    load_default_category_map,
)


def rect(x0, y0, x1, y1):
    return ((x0, y0), (x1, y0), (x1, y1), (x0, y1))


def grid_fixture(cols, rows, room_w=4.0, room_h=3.0, door_w=0.9,
                 assets=(), extra_doors=(), context="generic"):
    """Rooms on a cols x rows grid, a doorway on every shared wall."""
    rooms = []
    doors = []
    for j in range(rows):
        for i in range(cols):
            rid = f"r{j}{i}"
            x0, y0 = i * room_w, j * room_h
            rooms.append(RoomPolygon(id=rid, category="room",
                                     polygon=rect(x0, y0, x0 + room_w, y0 + room_h)))
            if i > 0:  # door in the vertical wall to the left neighbour
                cy = y0 + room_h / 2
                doors.append(DoorwaySegment(a=(x0, cy - door_w / 2),
                                            b=(x0, cy + door_w / 2), width=door_w))
            if j > 0:  # door in the horizontal wall to the lower neighbour
                cx = x0 + room_w / 2
                doors.append(DoorwaySegment(a=(cx - door_w / 2, y0),
                                            b=(cx + door_w / 2, y0), width=door_w))
    doors.extend(extra_doors)
    return SegmentationAnnotation(
        room_polygons=tuple(rooms),
        asset_boxes=tuple(assets),
        doorway_segments=tuple(doors),
        context=context,
    )


def oracle_adjacency(seg, tol=DOORWAY_WALL_TOLERANCE):
    """Brute force: a doorway links the two rooms whose boundaries both lie
    within tol of the whole segment (shapely Hausdorff-style check)."""
    edges = set()
    for d in seg.doorway_segments:
        line = LineString([d.a, d.b])
        near = []
        for rp in seg.room_polygons:
            boundary = ShapelyPolygon(rp.polygon).exterior
            if all(boundary.distance(
                    __import__("shapely.geometry", fromlist=["Point"]).Point(
                        line.interpolate(t, normalized=True)))
                   <= tol + 1e-12 for t in (0, 0.25, 0.5, 0.75, 1.0)):
                near.append(rp.id)
        if len(near) == 2:
            edges.add(tuple(sorted(near)))
    return edges


FIXTURES = [
    grid_fixture(2, 1),
    grid_fixture(3, 1),
    grid_fixture(2, 2),
    grid_fixture(3, 2),
    grid_fixture(4, 1),
    grid_fixture(2, 3),
    grid_fixture(3, 3),
    grid_fixture(1, 2),
    grid_fixture(4, 2, room_w=3.0, room_h=4.0),
    grid_fixture(2, 2, extra_doors=(
        DoorwaySegment(a=(1.0, 0.0), b=(1.9, 0.0), width=0.9),  # external, south wall
    )),
]


class TestAdjacencyOracle:
    @pytest.mark.parametrize("idx", range(len(FIXTURES)))
    def test_edge_set_matches_oracle(self, idx):
        seg = FIXTURES[idx]
        g = extract_scene_graph(seg, load_default_category_map())
        assert set(g.edge_pairs()) == oracle_adjacency(seg)

    def test_external_door_classified(self):
        seg = FIXTURES[9]
        classified = classify_doorways(seg)
        kinds = sorted(c.kind for c in classified)
        assert kinds.count("external") == 1
        ext = next(c for c in classified if c.kind == "external")
        assert ext.rooms == ("r00",)


class TestDoorwayClassification:
    def test_floating_segment_is_ambiguous(self):
        seg = grid_fixture(2, 1, extra_doors=(
            DoorwaySegment(a=(1.0, 1.0), b=(1.9, 1.0), width=0.9),  # mid-room
        ))
        with pytest.raises(AmbiguousDoorway):
            classify_doorways(seg)

    def test_tolerance_boundary(self):
        # segment offset from the shared wall by slightly more than tol
        off = DOORWAY_WALL_TOLERANCE + 0.01
        seg = grid_fixture(2, 1, extra_doors=(
            DoorwaySegment(a=(4.0 - off, 1.0), b=(4.0 - off, 1.9), width=0.9),))
        # still within one room's interior -> matches zero boundaries
        with pytest.raises(AmbiguousDoorway):
            classify_doorways(seg)

    def test_offset_within_tolerance_still_matches(self):
        off = DOORWAY_WALL_TOLERANCE - 0.01
        seg = grid_fixture(2, 1, extra_doors=(
            DoorwaySegment(a=(4.0 - off, 1.0), b=(4.0 - off, 1.9), width=0.9),))
        classified = classify_doorways(seg)
        assert classified[-1].kind == "inter_room"


class TestAssetFiltering:
    def test_drop_tokens_removed_exactly(self):
        assets = (
            AssetBox(category="chair", box=(0.5, 0.5, 1.0, 1.0), color="red"),
            AssetBox(category="door", box=(1.2, 0.5, 1.7, 1.0)),       # DROP
            AssetBox(category="rug", box=(2.0, 0.5, 3.0, 1.5)),        # DROP
            AssetBox(category="table", box=(4.5, 0.5, 5.5, 1.3)),
        )
        seg = grid_fixture(2, 1, assets=assets)
        g = extract_scene_graph(seg, load_default_category_map())
        per_room = {r.id: [a.description for a in r.assets] for r in g.rooms}
        assert sum(len(v) for v in per_room.values()) == 2
        assert per_room["r00"] and per_room["r01"]

    def test_asset_size_from_box_extent(self):
        assets = (AssetBox(category="chair", box=(0.5, 0.5, 1.0, 1.2), color="blue"),)
        g = extract_scene_graph(grid_fixture(2, 1, assets=assets),
                                load_default_category_map())
        a = g.rooms[0].assets[0]
        assert a.size[0] == pytest.approx(0.5)
        assert a.size[1] == pytest.approx(0.7)
        assert a.color == "blue"

    def test_unknown_token_rejected(self):
        assets = (AssetBox(category="hovercraft", box=(0.5, 0.5, 1.0, 1.0)),)
        with pytest.raises(ValidationError, match="hovercraft"):
            extract_scene_graph(grid_fixture(2, 1, assets=assets),
                                load_default_category_map())

    def test_orphan_asset_rejected(self):
        assets = (AssetBox(category="chair", box=(50.0, 50.0, 51.0, 51.0)),)
        with pytest.raises(OrphanAsset):
            extract_scene_graph(grid_fixture(2, 1, assets=assets),
                                load_default_category_map())


class TestDefaults:
    def test_no_external_door_defaults_to_first_room(self):
        g = extract_scene_graph(grid_fixture(2, 1), load_default_category_map())
        assert g.external_doorways == ("r00",)

    def test_difficulty_scales_with_rooms(self):
        g9 = extract_scene_graph(grid_fixture(3, 3), load_default_category_map())
        assert g9.difficulty == 3
        g2 = extract_scene_graph(grid_fixture(2, 1), load_default_category_map())
        assert g2.difficulty == 1

    def test_annotation_from_dict_round_trip(self):
        doc = {
            "rooms": [{"id": "a", "category": "room",
                       "polygon": [[0, 0], [4, 0], [4, 3], [0, 3]]}],
            "assets": [{"category": "chair", "box": [1, 1, 1.5, 1.5], "color": "red"}],
            "doorways": [{"a": [1.5, 0], "b": [2.4, 0]}],
            "context": "office",
        }
        seg = annotation_from_dict(doc)
        assert seg.context == "office"
        assert seg.doorway_segments[0].width == 0.9
        g = extract_scene_graph(seg, load_default_category_map())
        assert g.context == "office"
        assert g.external_doorways == ("a",)
