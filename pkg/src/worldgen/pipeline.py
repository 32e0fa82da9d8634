"""Full generation pipeline: prompt -> graph -> layout -> populate ->
scenario -> export, with per-stage wall-clock timing and a content-addressed
world store.

World ids are hashes of the canonical provenance, so determinism is
externally checkable and the store doubles as a cache. Timings are response
metadata, never written into the bundle, which keeps archives byte-identical
across runs.
"""

from __future__ import annotations

import hashlib
import json
import random
import shutil
import tempfile
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .errors import InvalidRequest, LayoutFailure
from .export import WorldBundle, write_world_bundle
from .layout import synthesize_floorplan, synthesize_graph
from .modeldb import ModelBundle
from .populate import place_assets
from .prompting import GenerationSpec, difficulty_targets, parse_prompt
from .scenario import generate_scenario
from .scenegraph import SceneGraph3D, serialize_scene_graph

STAGES = ("prompt", "graph", "layout", "dbquery", "fit", "scenario", "export")


@dataclass
class StageTimings:
    prompt: float = 0.0
    graph: float = 0.0
    layout: float = 0.0
    dbquery: float = 0.0
    fit: float = 0.0
    scenario: float = 0.0
    export: float = 0.0
    total: float = 0.0

    def add(self, other: "StageTimings") -> None:
        for name in STAGES + ("total",):
            setattr(self, name, getattr(self, name) + getattr(other, name))

    def to_dict(self) -> dict:
        return {k: round(v, 3) for k, v in asdict(self).items()}


@dataclass(frozen=True)
class GenerateRequest:
    prompt: str | None = None
    spec: GenerationSpec | None = None
    graph: SceneGraph3D | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        variants = sum(x is not None for x in (self.prompt, self.spec, self.graph))
        if variants != 1:
            raise InvalidRequest(
                f"exactly one of prompt/spec/graph required, got {variants}"
            )


@dataclass
class PipelineResult:
    world_ids: list[str]
    worlds: list[dict]          # {world_id, level, index, path}
    timings: StageTimings       # summed over the batch
    per_world_timings: dict[str, StageTimings]
    failures: list[dict]        # {level, index, error}


def derive_world_seed(seed: int, level: int, index: int) -> int:
    digest = hashlib.blake2b(
        f"{seed}:{level}:{index}".encode(), digest_size=8, key=b"worldgen-seed"
    ).digest()
    return int.from_bytes(digest, "little")


def world_id_for(provenance: dict) -> str:
    core = {k: v for k, v in sorted(provenance.items()) if k != "world_id"}
    blob = json.dumps(core, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


def generate_world(g: SceneGraph3D, targets, rng: random.Random,
                   db: ModelBundle, timings: StageTimings) -> WorldBundle:
    """The per-world part of the pipeline, graph onward."""
    t0 = time.perf_counter()
    fp = synthesize_floorplan(g, rng)
    timings.layout += (time.perf_counter() - t0) * 1000.0

    placements, report = place_assets(fp, g, db, rng)
    timings.dbquery += report.dbquery_ms
    timings.fit += report.fit_ms

    t0 = time.perf_counter()
    agents, skipped = generate_scenario(fp, placements, targets, rng)
    timings.scenario += (time.perf_counter() - t0) * 1000.0

    provenance = {
        "generator_version": __version__,
        "context": g.context,
        "level": g.difficulty,
        "graph_sha256": hashlib.sha256(serialize_scene_graph(g)).hexdigest(),
        "no_match_count": len(report.no_match),
        "unfit_count": len(report.unfit),
        "skipped_agents": len(skipped),
        "dropped_edges": [list(e) for e in fp.dropped_edges],
    }
    return WorldBundle(
        scene_graph=g,
        floorplan=fp,
        placements=tuple(placements),
        agents=tuple(agents),
        provenance=provenance,
    )


def _persist(world: WorldBundle, store_dir: Path, timings: StageTimings) -> str:
    t0 = time.perf_counter()
    wid = world.provenance["world_id"]
    dest = store_dir / wid
    if not dest.exists():
        # atomic per-world write: stage into a temp dir, then rename
        tmp = Path(tempfile.mkdtemp(dir=store_dir, prefix=".tmp-"))
        write_world_bundle(world, tmp)
        try:
            tmp.rename(dest)
        except OSError:
            shutil.rmtree(tmp, ignore_errors=True)  # concurrent writer won
    timings.export += (time.perf_counter() - t0) * 1000.0
    return wid


def run_pipeline(req: GenerateRequest, db: ModelBundle,
                 store_dir: str | Path, calibration: dict | None = None
                 ) -> PipelineResult:
    """Execute the batch; a failing world never aborts its siblings."""
    store_dir = Path(store_dir)
    store_dir.mkdir(parents=True, exist_ok=True)
    total_t0 = time.perf_counter()
    batch = StageTimings()
    per_world: dict[str, StageTimings] = {}
    worlds: list[dict] = []
    failures: list[dict] = []

    jobs: list[tuple[int, int, SceneGraph3D | None]] = []
    prompt_text = req.prompt or ""
    if req.graph is not None:
        spec = None
        jobs.append((req.graph.difficulty, 0, req.graph))
    else:
        t0 = time.perf_counter()
        spec = req.spec if req.spec is not None else parse_prompt(req.prompt, seed=req.seed)
        batch.prompt += (time.perf_counter() - t0) * 1000.0
        for level in spec.levels:
            for index in range(spec.worlds_per_level):
                jobs.append((level, index, None))

    for level, index, graph in jobs:
        timings = StageTimings()
        seed = req.seed if spec is None else spec.seed
        world_seed = derive_world_seed(seed, level, index)
        rng = random.Random(world_seed)
        try:
            if graph is None:
                t0 = time.perf_counter()
                context = spec.context
                targets = difficulty_targets(context, level, calibration)
                override = spec.overrides.get(level)
                if override is not None:
                    targets = _apply_override(targets, override)
                g = synthesize_graph(targets, context, rng, calibration)
                timings.graph += (time.perf_counter() - t0) * 1000.0
            else:
                g = graph
                targets = difficulty_targets(g.context, g.difficulty, calibration)
            world = generate_world(g, targets, rng, db, timings)
            world.provenance.update({
                "prompt": prompt_text,
                "seed": seed,
                "world_seed": world_seed,
                "index": index,
                "level": level,
            })
            world.provenance["world_id"] = world_id_for(world.provenance)
            wid = _persist(world, store_dir, timings)
        except LayoutFailure as exc:
            failures.append({"level": level, "index": index, "error": str(exc)})
            continue
        timings.total = sum(getattr(timings, s) for s in STAGES)
        per_world[wid] = timings
        batch.add(timings)
        worlds.append({"world_id": wid, "level": level, "index": index,
                       "path": str(store_dir / wid)})

    batch.total = (time.perf_counter() - total_t0) * 1000.0
    return PipelineResult(
        world_ids=[w["world_id"] for w in worlds],
        worlds=worlds,
        timings=batch,
        per_world_timings=per_world,
        failures=failures,
    )


def _apply_override(targets, override):
    from .prompting import DifficultyTargets

    return DifficultyTargets(
        rooms_target=override.rooms_target or targets.rooms_target,
        assets_per_room_mean=(override.assets_per_room_target
                              if override.assets_per_room_target is not None
                              else targets.assets_per_room_mean),
        pedestrians=(override.pedestrians if override.pedestrians is not None
                     else targets.pedestrians),
        extra_edge_fraction=targets.extra_edge_fraction,
    )
