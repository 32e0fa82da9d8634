"""HTTP service over the generation pipeline and model database.

One process serves generation, the world store, database queries, the
extraction path for pre-segmented floor plans, corpus metrics, and the
annotation staging area backing the explorer UI. The loaded bundle is
immutable; annotation edits land in a staging manifest directory and take
effect only after an explicit rebuild call.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import Body, FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse, Response

from .errors import WorldgenError
from .export import evaluate_corpus, metrics_csv, read_world_bundle
from .extract import extract_scene_graph, load_default_category_map, annotation_from_dict
from .modeldb import ModelRecord, QueryFilter, build_bundle, load_bundle, query
from .pipeline import GenerateRequest, run_pipeline
from .prompting import GenerationSpec, LevelOverride
from .scenegraph import graph_from_dict, graph_to_dict
from .seeddb import generate_seed_manifests

BUNDLE_FILES = ("graph.json", "realized.json", "floorplan.json", "placements.json",
                "scenario.yaml", "map.pgm", "map.yaml", "world.svg", "provenance.json")


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def _record_json(rec: ModelRecord, score: float | None = None) -> dict:
    d = {
        "id": rec.id,
        "description": rec.description,
        "footprint_hull": [[x, y] for x, y in rec.footprint_hull],
        "height": rec.height,
        "color_materials": [list(cm) for cm in rec.color_materials],
        "room_affinity": dict(rec.room_affinity),
        "tags": list(rec.tags),
    }
    if score is not None:
        d["score"] = score
    return d


def create_app(store_dir: str | Path, bundle_path: str | Path | None = None,
               manifest_dir: str | Path | None = None,
               calibration: dict | None = None,
               static_dir: str | Path | None = None) -> FastAPI:
    store = Path(store_dir)
    store.mkdir(parents=True, exist_ok=True)

    if manifest_dir is None:
        manifest_dir = store / "staging"
        if not manifest_dir.is_dir() or not any(manifest_dir.glob("*.json")):
            generate_seed_manifests(manifest_dir)
    manifest_dir = Path(manifest_dir)

    if bundle_path is None:
        bundle_path = store / "models.amb"
        if not bundle_path.is_file():
            build_bundle(manifest_dir, bundle_path)
    bundle_path = Path(bundle_path)

    app = FastAPI(title="worldgen")
    app.state.store = store
    app.state.bundle = load_bundle(bundle_path)
    app.state.bundle_version = 1
    app.state.manifest_dir = manifest_dir
    app.state.staged_edits: set[str] = set()
    app.state.calibration = calibration

    @app.exception_handler(WorldgenError)
    async def _on_engine_error(request: Request, exc: WorldgenError):
        return _error(400, type(exc).__name__, str(exc))

    @app.post("/api/generate")
    def generate(payload: dict = Body(...)):
        spec = None
        if payload.get("spec") is not None:
            s = payload["spec"]
            overrides = {
                int(lvl): LevelOverride(
                    rooms_target=o.get("rooms_target"),
                    assets_per_room_target=o.get("assets_per_room_target"),
                    pedestrians=o.get("pedestrians"),
                )
                for lvl, o in (s.get("overrides") or {}).items()
            }
            spec = GenerationSpec(
                context=s.get("context", "generic"),
                levels=tuple(s.get("levels", (1, 2, 3, 4, 5))),
                worlds_per_level=int(s.get("worlds_per_level", 1)),
                seed=int(s.get("seed", payload.get("seed", 0))),
                overrides=overrides,
            )
        graph = graph_from_dict(payload["graph"]) if payload.get("graph") is not None else None
        req = GenerateRequest(
            prompt=payload.get("prompt"),
            spec=spec,
            graph=graph,
            seed=int(payload.get("seed", 0)),
        )
        result = run_pipeline(req, app.state.bundle, store, app.state.calibration)
        return {
            "worldIds": result.world_ids,
            "worlds": result.worlds,
            "timings": result.timings.to_dict(),
            "perWorldTimings": {k: v.to_dict() for k, v in result.per_world_timings.items()},
            "failures": result.failures,
        }

    def _world_dir(world_id: str) -> Path | None:
        d = store / world_id
        return d if d.is_dir() else None

    @app.get("/api/worlds/{world_id}")
    def world_manifest(world_id: str):
        d = _world_dir(world_id)
        if d is None:
            return _error(404, "UnknownWorld", f"no world {world_id!r}")
        provenance = json.loads((d / "provenance.json").read_text("utf-8"))
        return {"worldId": world_id, "files": list(BUNDLE_FILES), "provenance": provenance}

    _MEDIA = {
        "floorplan.svg": ("world.svg", "image/svg+xml"),
        "map.pgm": ("map.pgm", "application/octet-stream"),
        "map.yaml": ("map.yaml", "text/yaml"),
        "scenario.yaml": ("scenario.yaml", "text/yaml"),
        "graph.json": ("graph.json", "application/json"),
        "realized.json": ("realized.json", "application/json"),
        "floorplan.json": ("floorplan.json", "application/json"),
        "placements.json": ("placements.json", "application/json"),
    }

    @app.get("/api/worlds/{world_id}/{resource}")
    def world_resource(world_id: str, resource: str):
        d = _world_dir(world_id)
        if d is None:
            return _error(404, "UnknownWorld", f"no world {world_id!r}")
        if resource not in _MEDIA:
            return _error(404, "UnknownResource", f"no resource {resource!r}")
        filename, media = _MEDIA[resource]
        return Response(content=(d / filename).read_bytes(), media_type=media)

    @app.post("/api/db/query")
    def db_query(payload: dict = Body(...)):
        f = payload.get("filter") or {}
        qfilter = QueryFilter(
            color=f.get("color"),
            tags=frozenset(f.get("tags") or ()),
            room_category=f.get("room_category"),
            min_affinity=float(f.get("min_affinity", 0.0)),
            max_footprint=tuple(f["max_footprint"]) if f.get("max_footprint") else None,
        )
        hits = query(app.state.bundle, payload.get("text", ""), qfilter,
                     k=int(payload.get("k", 5)))
        return {"results": [_record_json(rec, score) for rec, score in hits],
                "bundleVersion": app.state.bundle_version}

    @app.post("/api/extract")
    def extract(payload: dict = Body(...)):
        annotation = annotation_from_dict(payload.get("annotation", payload))
        cmap = load_default_category_map()
        cmap.update(payload.get("category_map") or {})
        return graph_to_dict(extract_scene_graph(annotation, cmap))

    @app.get("/api/metrics")
    def metrics(ids: str = ""):
        world_ids = [w for w in ids.split(",") if w]
        worlds = []
        for wid in world_ids:
            d = _world_dir(wid)
            if d is None:
                return _error(404, "UnknownWorld", f"no world {wid!r}")
            worlds.append(read_world_bundle(d))
        if not worlds:
            return _error(400, "EmptyCorpus", "no world ids given")
        return PlainTextResponse(metrics_csv(evaluate_corpus(worlds)), media_type="text/csv")

    @app.put("/api/db/annotations/{model_id}")
    def update_annotations(model_id: str, payload: dict = Body(...)):
        manifest_path = app.state.manifest_dir / f"{model_id}.json"
        if not manifest_path.is_file():
            return _error(404, "UnknownModel", f"no model {model_id!r}")
        if model_id in app.state.staged_edits and not payload.get("overwrite", False):
            return _error(409, "StagedEditConflict",
                          f"{model_id!r} already has a staged edit; pass overwrite=true")
        doc = json.loads(manifest_path.read_text("utf-8"))
        editable = ("description", "color_materials", "room_affinity", "tags", "height")
        for key in editable:
            if key in payload:
                doc[key] = payload[key]
        manifest_path.write_text(json.dumps(doc, indent=2) + "\n", "utf-8")
        app.state.staged_edits.add(model_id)
        return {"modelId": model_id, "staged": True,
                "note": "run /api/db/rebuild to apply"}

    @app.post("/api/db/rebuild")
    def rebuild():
        version = app.state.bundle_version + 1
        out = store / f"models-v{version}.amb"
        build_bundle(app.state.manifest_dir, out)
        app.state.bundle = load_bundle(out)
        app.state.bundle_version = version
        app.state.staged_edits.clear()
        return {"bundleVersion": version}

    @app.get("/api/db/version")
    def db_version():
        return {"bundleVersion": app.state.bundle_version,
                "records": len(app.state.bundle.records)}

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
