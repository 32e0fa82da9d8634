"""Command-line interface: generate, extract, db build/seed/query, eval,
serve, validate.

Exit codes: 0 success, 1 usage error, 2 validation failure. The world store
path comes from --store or the WORLDGEN_STORE environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .config import load_calibration
from .errors import WorldgenError
from .export import evaluate_corpus, metrics_csv, read_world_bundle
from .extract import extract_scene_graph, load_default_category_map, parse_annotation
from .modeldb import QueryFilter, build_bundle, load_bundle, query
from .pipeline import GenerateRequest, run_pipeline
from .scenegraph import parse_scene_graph, serialize_scene_graph
from .seeddb import build_default_bundle
from .validate import validate_bundle_dir


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _default_store() -> str:
    return os.environ.get("WORLDGEN_STORE", "./worldstore")


def _ensure_bundle(path: str | None, store: Path) -> Path:
    if path is not None:
        return Path(path)
    default = store / "models.amb"
    if not default.is_file():
        build_default_bundle(default)
    return default


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="worldgen", description=__doc__)
    p.add_argument("--config", help="calibration override file (JSON)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="run the full generation pipeline")
    g.add_argument("--prompt", help="natural-language generation prompt")
    g.add_argument("--graph", help="path to a scene-graph JSON document")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--store", default=_default_store())
    g.add_argument("--bundle", help="model database bundle (.amb)")

    e = sub.add_parser("extract", help="segmentation annotation -> scene graph")
    e.add_argument("annotation", help="annotation JSON file")
    e.add_argument("--category-map", help="category map overrides (JSON)")
    e.add_argument("--out", help="output file (default stdout)")

    db = sub.add_parser("db", help="model database tools")
    dbsub = db.add_subparsers(dest="db_command", required=True)
    b = dbsub.add_parser("build", help="build a bundle from a manifest directory")
    b.add_argument("--manifest", required=True)
    b.add_argument("--out", required=True)
    s = dbsub.add_parser("seed", help="build the default synthetic bundle")
    s.add_argument("--out", required=True)
    q = dbsub.add_parser("query", help="query a bundle")
    q.add_argument("text")
    q.add_argument("--bundle", required=True)
    q.add_argument("--k", type=int, default=5)
    q.add_argument("--color")
    q.add_argument("--room")
    q.add_argument("--min-affinity", type=float, default=0.0)

    ev = sub.add_parser("eval", help="corpus metrics CSV for stored worlds")
    ev.add_argument("--store", default=_default_store())
    ev.add_argument("--ids", help="comma-separated world ids (default: all)")
    ev.add_argument("--out", help="output CSV file (default stdout)")

    sv = sub.add_parser("serve", help="start the HTTP service")
    sv.add_argument("--port", type=int, default=8000)
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--store", default=_default_store())
    sv.add_argument("--bundle")
    sv.add_argument("--static", help="static UI directory to serve at /")

    v = sub.add_parser("validate", help="run all validators on a world bundle")
    v.add_argument("bundle_dir")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    calibration = load_calibration(args.config) if args.config else None
    try:
        return _dispatch(args, calibration)
    except WorldgenError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def _dispatch(args, calibration) -> int:
    if args.command == "generate":
        store = Path(args.store)
        store.mkdir(parents=True, exist_ok=True)
        bundle = load_bundle(_ensure_bundle(args.bundle, store))
        if args.graph:
            req = GenerateRequest(graph=parse_scene_graph(Path(args.graph).read_bytes()),
                                  seed=args.seed)
        elif args.prompt is not None:
            req = GenerateRequest(prompt=args.prompt, seed=args.seed)
        else:
            print("error: one of --prompt/--graph is required", file=sys.stderr)
            return 1
        result = run_pipeline(req, bundle, store, calibration)
        print(json.dumps({
            "worldIds": result.world_ids,
            "timings": result.timings.to_dict(),
            "failures": result.failures,
        }, indent=2))
        return 0

    if args.command == "extract":
        annotation = parse_annotation(Path(args.annotation).read_bytes())
        cmap = load_default_category_map()
        if args.category_map:
            cmap.update(json.loads(Path(args.category_map).read_text("utf-8")))
        data = serialize_scene_graph(extract_scene_graph(annotation, cmap))
        if args.out:
            Path(args.out).write_bytes(data)
        else:
            sys.stdout.write(data.decode("utf-8"))
        return 0

    if args.command == "db":
        if args.db_command == "build":
            out = build_bundle(args.manifest, args.out)
            print(f"built {out}")
        elif args.db_command == "seed":
            out = build_default_bundle(args.out)
            print(f"built {out}")
        else:
            bundle = load_bundle(args.bundle)
            qfilter = QueryFilter(
                color=args.color,
                room_category=args.room,
                min_affinity=args.min_affinity,
            )
            for rec, score in query(bundle, args.text, qfilter, k=args.k):
                print(f"{score:.4f}  {rec.id}  {rec.description}")
        return 0

    if args.command == "eval":
        store = Path(args.store)
        if args.ids:
            ids = [w for w in args.ids.split(",") if w]
        else:
            ids = sorted(d.name for d in store.iterdir()
                         if d.is_dir() and (d / "provenance.json").is_file())
        worlds = [read_world_bundle(store / wid) for wid in ids]
        if not worlds:
            print("error: no worlds found", file=sys.stderr)
            return 1
        csv_text = metrics_csv(evaluate_corpus(worlds))
        if args.out:
            Path(args.out).write_text(csv_text, "utf-8")
        else:
            sys.stdout.write(csv_text)
        return 0

    if args.command == "serve":
        import uvicorn

        from .server import create_app

        app = create_app(args.store, args.bundle, calibration=calibration,
                         static_dir=args.static)
        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    if args.command == "validate":
        violations = validate_bundle_dir(args.bundle_dir)
        if violations:
            for v in violations:
                print(f"VIOLATION: {v}")
            return 2
        print("ok")
        return 0

    return 1


if __name__ == "__main__":
    sys.exit(main())
