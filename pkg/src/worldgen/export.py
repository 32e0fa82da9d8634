"""World serialization and corpus metrics.

A world bundle is a directory: graph.json, realized.json, floorplan.json,
placements.json, scenario.yaml, map.pgm, map.yaml, world.svg,
provenance.json. The occupancy grid follows navigation-stack map_server
conventions bit-exactly (P5 PGM, 0 occupied / 254 free / 205 unknown).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import geometry as geo
from .errors import CorruptBundle
from .layout import (
    DOOR_SWING,
    WALL_THICKNESS,
    FloorPlan,
    floorplan_to_dict,
    floorplan_from_dict,
    realized_graph,
)
from .populate import Placement
from .scenario import Agent, scenario_from_dict, scenario_to_dict, serialize_scenario
from .scenegraph import (
    GraphMetrics,
    SceneGraph3D,
    compute_graph_metrics,
    graph_from_dict,
    graph_to_dict,
    serialize_scene_graph,
)

OCCUPIED = 0
UNKNOWN = 205
FREE = 254

_CATEGORY_FILL = [
    "#cfe8ef", "#e8efcf", "#efcfe8", "#efe3cf", "#cfd4ef",
    "#d9efcf", "#efcfcf", "#cfefe6", "#e6e6e6", "#efe9cf",
]


@dataclass(frozen=True)
class WorldBundle:
    scene_graph: SceneGraph3D
    floorplan: FloorPlan
    placements: tuple[Placement, ...]
    agents: tuple[Agent, ...]
    provenance: dict

    @property
    def realized(self) -> SceneGraph3D:
        return realized_graph(self.floorplan)


# ---------------------------------------------------------------------------
# Occupancy grid


def export_occupancy_grid(fp: FloorPlan, placements) -> tuple[bytes, bytes]:
    """(PGM bytes, YAML metadata bytes) at the plan's resolution."""
    res = fp.resolution
    x0, y0, x1, y1 = fp.bounds
    width = int(round((x1 - x0) / res))
    height = int(round((y1 - y0) / res))
    if width < 1 or height < 1:
        grid = np.full((1, 1), UNKNOWN, dtype=np.uint8)
        return _render_pgm(grid), _render_map_yaml(res, (x0, y0))

    grid = np.full((height, width), UNKNOWN, dtype=np.uint8)
    cx = x0 + (np.arange(width) + 0.5) * res
    cy = y0 + (np.arange(height) + 0.5) * res

    def rect_mask(rx0, ry0, rx1, ry1):
        return np.outer((cy >= ry0) & (cy <= ry1), (cx >= rx0) & (cx <= rx1))

    half = WALL_THICKNESS / 2.0
    room_rects = [geo.polygon_bounds(r.polygon) for r in fp.rooms]

    # free interiors first
    for rx0, ry0, rx1, ry1 in room_rects:
        grid[rect_mask(rx0, ry0, rx1, ry1)] = FREE
    # wall strips override
    for rx0, ry0, rx1, ry1 in room_rects:
        outer = rect_mask(rx0 - half, ry0 - half, rx1 + half, ry1 + half)
        inner = rect_mask(rx0 + half, ry0 + half, rx1 - half, ry1 - half)
        grid[outer & ~inner] = OCCUPIED
    # doorway openings punch through the walls
    for d in fp.doorways:
        (ax, ay), (bx, by) = d.a, d.b
        punch = half + res
        if abs(ax - bx) < 1e-9:  # vertical wall
            mask = rect_mask(ax - punch, min(ay, by), ax + punch, max(ay, by))
        else:
            mask = rect_mask(min(ax, bx), ay - punch, max(ax, bx), ay + punch)
        grid[mask] = FREE
    # placed model footprints
    for p in placements:
        _fill_convex(grid, p.world_hull, cx, cy, OCCUPIED)
    return _render_pgm(grid), _render_map_yaml(res, (x0, y0))


def _fill_convex(grid, hull, cx, cy, value) -> None:
    hx0, hy0, hx1, hy1 = geo.polygon_bounds(hull)
    ix = np.nonzero((cx >= hx0) & (cx <= hx1))[0]
    iy = np.nonzero((cy >= hy0) & (cy <= hy1))[0]
    if len(ix) == 0 or len(iy) == 0:
        return
    px = cx[ix][None, :]
    py = cy[iy][:, None]
    inside = np.ones((len(iy), len(ix)), dtype=bool)
    n = len(hull)
    for i in range(n):
        x0, y0 = hull[i]
        x1, y1 = hull[(i + 1) % n]
        inside &= (x1 - x0) * (py - y0) - (y1 - y0) * (px - x0) >= 0
    sub = grid[np.ix_(iy, ix)]
    sub[inside] = value
    grid[np.ix_(iy, ix)] = sub


def _render_pgm(grid: np.ndarray) -> bytes:
    h, w = grid.shape
    header = f"P5\n{w} {h}\n255\n".encode("ascii")
    return header + np.flipud(grid).tobytes()  # row 0 at the top of the image


def _render_map_yaml(resolution: float, origin: tuple[float, float]) -> bytes:
    doc = {
        "image": "map.pgm",
        "resolution": resolution,
        "origin": [round(origin[0], 3), round(origin[1], 3), 0.0],
        "negate": 0,
        "occupied_thresh": 0.65,
        "free_thresh": 0.196,
    }
    return yaml.safe_dump(doc, sort_keys=False).encode("utf-8")


def parse_pgm(data: bytes) -> np.ndarray:
    """Binary P5 reader (for validation and tests)."""
    if not data.startswith(b"P5"):
        raise CorruptBundle("not a P5 PGM")
    parts = data.split(b"\n", 3)
    w, h = (int(v) for v in parts[1].split())
    return np.flipud(np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w))


# ---------------------------------------------------------------------------
# SVG render


def _svg_pts(poly, y1: float) -> str:
    return " ".join(f"{round(x, 3)},{round(y1 - y, 3)}" for x, y in poly)


def export_svg(world: WorldBundle) -> bytes:
    """Deterministic floor-plan render with toggleable layers."""
    fp = world.floorplan
    x0, y0, x1, y1 = fp.bounds
    pad = 0.5
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{round(x0 - pad, 3)} {round(-pad, 3)} '
        f'{round(x1 - x0 + 2 * pad, 3)} {round(y1 - y0 + 2 * pad, 3)}">',
        f'<rect id="canvas" x="{round(x0 - pad, 3)}" y="{round(-pad, 3)}" '
        f'width="{round(x1 - x0 + 2 * pad, 3)}" height="{round(y1 - y0 + 2 * pad, 3)}" '
        f'fill="#ffffff"/>',
        '<g id="layer-rooms">',
    ]
    categories = sorted({r.category for r in fp.rooms})
    for r in sorted(fp.rooms, key=lambda r: r.room_id):
        fill = _CATEGORY_FILL[categories.index(r.category) % len(_CATEGORY_FILL)]
        out.append(
            f'<polygon class="room" data-room="{r.room_id}" '
            f'points="{_svg_pts(r.polygon, y1)}" '
            f'fill="{fill}" stroke="#333333" stroke-width="0.15"/>'
        )
    out.append('</g><g id="layer-doorways">')
    for d in sorted(fp.doorways, key=lambda d: (d.kind, d.rooms, d.a)):
        (ax, ay), (bx, by) = d.a, d.b
        out.append(
            f'<line class="doorway" x1="{round(ax, 3)}" y1="{round(y1 - ay, 3)}" '
            f'x2="{round(bx, 3)}" y2="{round(y1 - by, 3)}" '
            f'stroke="#ffffff" stroke-width="0.18"/>'
        )
    out.append('</g><g id="layer-zones">')
    for z in sorted(fp.zones, key=lambda z: (z.room_id, z.asset_index)):
        out.append(
            f'<polygon class="zone" points="{_svg_pts(z.polygon, y1)}" '
            f'fill="none" stroke="#88aa88" stroke-width="0.03" stroke-dasharray="0.1,0.1"/>'
        )
    out.append('</g><g id="layer-hulls">')
    for p in sorted(world.placements, key=lambda p: (p.room_id, p.asset_index)):
        out.append(
            f'<polygon class="hull" data-model="{p.model_id}" '
            f'points="{_svg_pts(p.world_hull, y1)}" '
            f'fill="#b0b0b0" stroke="#555555" stroke-width="0.04"/>'
        )
    out.append('</g><g id="layer-agents">')
    for a in sorted(world.agents, key=lambda a: a.id):
        out.append(
            f'<circle class="agent" data-role="{a.role}" cx="{round(a.spawn[0], 3)}" '
            f'cy="{round(y1 - a.spawn[1], 3)}" r="0.25" fill="#e07a5f">'
            f'<title>{a.id}: {a.role}</title></circle>'
        )
    out.append('</g></svg>')
    return ("\n".join(out) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Corpus metrics

METRIC_NAMES = ("rooms", "leaf_rooms", "assets", "edges", "diameter", "pedestrians")


@dataclass(frozen=True)
class MetricsRow:
    world_id: str
    level: int
    metrics: GraphMetrics
    pedestrians: int
    no_match_count: int
    unfit_count: int

    def value(self, name: str) -> float:
        if name == "pedestrians":
            return float(self.pedestrians)
        return float(getattr(self.metrics, name))


@dataclass
class MetricsReport:
    rows: list[MetricsRow]
    aggregates: dict[tuple[str, int], tuple[float, float, float]]  # mean, var, cv
    pearson: dict[str, float]  # per metric; NaN when undefined

    def level_means(self, name: str) -> dict[int, float]:
        return {lvl: agg[0] for (m, lvl), agg in self.aggregates.items() if m == name}


def _pearson(xs: list[float], ys: list[float]) -> float:
    if len(xs) < 2:
        return float("nan")
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.std() == 0.0 or y.std() == 0.0:
        return float("nan")
    return float(np.corrcoef(x, y)[0, 1])


def evaluate_corpus(worlds: list[WorldBundle]) -> MetricsReport:
    """Per-world rows (realized-graph metrics) plus per-level aggregates."""
    rows = []
    for w in worlds:
        prov = w.provenance
        rows.append(MetricsRow(
            world_id=prov.get("world_id", "unknown"),
            level=int(prov.get("level", w.floorplan.difficulty)),
            metrics=compute_graph_metrics(w.realized),
            pedestrians=len(w.agents),
            no_match_count=int(prov.get("no_match_count", 0)),
            unfit_count=int(prov.get("unfit_count", 0)),
        ))
    rows.sort(key=lambda r: (r.level, r.world_id))

    levels = sorted({r.level for r in rows})
    aggregates: dict[tuple[str, int], tuple[float, float, float]] = {}
    for name in METRIC_NAMES:
        for lvl in levels:
            vals = [r.value(name) for r in rows if r.level == lvl]
            mean = sum(vals) / len(vals)
            var = sum((v - mean) ** 2 for v in vals) / len(vals)
            cv = math.sqrt(var) / mean if mean != 0 else float("nan")
            aggregates[(name, lvl)] = (mean, var, cv)
    pearson = {
        name: _pearson([float(lvl) for lvl in levels],
                       [aggregates[(name, lvl)][0] for lvl in levels])
        for name in METRIC_NAMES
    }
    return MetricsReport(rows=rows, aggregates=aggregates, pearson=pearson)


def _fmt(v: float) -> str:
    return "NaN" if math.isnan(v) else f"{v:.6g}"


def metrics_csv(report: MetricsReport) -> str:
    """Stable-ordered CSV: data rows, then a summary section."""
    lines = ["world_id,level,rooms,leaf_rooms,assets,edges,diameter,"
             "pedestrians,no_match_count,unfit_count"]
    for r in report.rows:
        m = r.metrics
        lines.append(
            f"{r.world_id},{r.level},{m.rooms},{m.leaf_rooms},{m.assets},"
            f"{m.edges},{m.diameter},{r.pedestrians},{r.no_match_count},{r.unfit_count}"
        )
    lines.append("")
    lines.append("section,metric,level,mean,variance,cv")
    for (name, lvl) in sorted(report.aggregates):
        mean, var, cv = report.aggregates[(name, lvl)]
        lines.append(f"aggregate,{name},{lvl},{_fmt(mean)},{_fmt(var)},{_fmt(cv)}")
    for name in METRIC_NAMES:
        lines.append(f"pearson_r,{name},,{_fmt(report.pearson[name])},,")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Bundle persistence


def placements_to_list(placements) -> list[dict]:
    return [
        {
            "model_id": p.model_id,
            "position": [round(p.position[0], 3), round(p.position[1], 3)],
            "rotation": p.rotation,
            "world_hull": [[round(x, 3), round(y, 3)] for x, y in p.world_hull],
            "room_id": p.room_id,
            "asset_index": p.asset_index,
        }
        for p in sorted(placements, key=lambda p: (p.room_id, p.asset_index))
    ]


def placements_from_list(docs) -> tuple[Placement, ...]:
    return tuple(
        Placement(
            model_id=d["model_id"],
            position=(float(d["position"][0]), float(d["position"][1])),
            rotation=int(d["rotation"]),
            world_hull=tuple((float(x), float(y)) for x, y in d["world_hull"]),
            room_id=d["room_id"],
            asset_index=int(d["asset_index"]),
        )
        for d in docs
    )


def write_world_bundle(world: WorldBundle, out_dir: str | Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "graph.json").write_bytes(serialize_scene_graph(world.scene_graph))
    (out_dir / "realized.json").write_bytes(serialize_scene_graph(world.realized))
    (out_dir / "floorplan.json").write_bytes(
        (json.dumps(floorplan_to_dict(world.floorplan), indent=2) + "\n").encode()
    )
    (out_dir / "placements.json").write_bytes(
        (json.dumps(placements_to_list(world.placements), indent=2) + "\n").encode()
    )
    (out_dir / "scenario.yaml").write_bytes(serialize_scenario(list(world.agents)))
    pgm, map_yaml = export_occupancy_grid(world.floorplan, world.placements)
    (out_dir / "map.pgm").write_bytes(pgm)
    (out_dir / "map.yaml").write_bytes(map_yaml)
    (out_dir / "world.svg").write_bytes(export_svg(world))
    (out_dir / "provenance.json").write_bytes(
        (json.dumps(world.provenance, indent=2, sort_keys=True) + "\n").encode()
    )
    return out_dir


def read_world_bundle(path: str | Path) -> WorldBundle:
    path = Path(path)

    def load(name: str, parser):
        f = path / name
        try:
            return parser(f.read_bytes())
        except Exception as exc:
            raise CorruptBundle(f"{f}: {exc}") from exc

    graph = load("graph.json", lambda b: graph_from_dict(json.loads(b)))
    fp = load("floorplan.json", lambda b: floorplan_from_dict(json.loads(b)))
    placements = load("placements.json", lambda b: placements_from_list(json.loads(b)))
    agents = load("scenario.yaml", lambda b: scenario_from_dict(yaml.safe_load(b)))
    provenance = load("provenance.json", lambda b: json.loads(b))
    load("realized.json", lambda b: graph_from_dict(json.loads(b)))
    load("map.pgm", parse_pgm)
    return WorldBundle(
        scene_graph=graph,
        floorplan=fp,
        placements=tuple(placements),
        agents=tuple(agents),
        provenance=provenance,
    )
