"""Semantic model database: build pipeline, bundle format, query engine.

A bundle (.amb) is a deflate zip holding index.json (records + base64
vectors) and payload/<id>.bin geometry blobs. Bundles are immutable after
load; queries are pure. Builds are byte-reproducible: fixed zip timestamps,
sorted entries, deterministic embeddings.
"""

from __future__ import annotations

import base64
import hashlib
import json
import math
import re
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import geometry as geo
from .errors import DuplicateId, ManifestError, ValidationError

FORMAT_VERSION = 1
EMBED_DIM = 256
_HASH_KEY = b"worldgen-embed-v1"
_TOKEN_RE = re.compile(r"[a-z0-9]+")
_ZIP_DATE = (1980, 1, 1, 0, 0, 0)


def embed_text(text: str) -> np.ndarray:
    """Deterministic signed-hash bag-of-tokens embedding, unit L2 norm.

    Each lowercase alphanumeric token is keyed-blake2b hashed into two
    independent (sign, slot) pairs; using two slots per token makes whole-token
    collisions vanishingly rare. Empty text embeds to zero.
    """
    vec = np.zeros(EMBED_DIM, dtype=np.float64)
    for token in _TOKEN_RE.findall(text.lower()):
        digest = hashlib.blake2b(
            token.encode("utf-8"), digest_size=16, key=_HASH_KEY
        ).digest()
        for half in (digest[:8], digest[8:]):
            h = int.from_bytes(half, "little")
            sign = 1.0 if h & 1 else -1.0
            vec[(h >> 1) % EMBED_DIM] += sign
    norm = float(np.linalg.norm(vec))
    if norm > 0.0:
        vec /= norm
    return vec


@dataclass(frozen=True)
class ModelRecord:
    id: str
    description: str
    footprint_hull: tuple[geo.Point, ...]  # convex, CCW
    height: float
    color_materials: tuple[tuple[str, str], ...]
    room_affinity: dict[str, float]
    tags: tuple[str, ...]
    payload_ref: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValidationError("model id must be non-empty")
        if not geo.is_convex_ccw(list(self.footprint_hull)):
            raise ValidationError(f"model {self.id}: footprint hull not convex CCW")
        if self.height <= 0:
            raise ValidationError(f"model {self.id}: height must be > 0")
        if not self.color_materials:
            raise ValidationError(f"model {self.id}: needs at least one color-material")
        for cat, w in self.room_affinity.items():
            if not 0.0 <= w <= 1.0:
                raise ValidationError(f"model {self.id}: affinity {cat}={w} outside [0,1]")

    @property
    def footprint_extent(self) -> tuple[float, float]:
        x0, y0, x1, y1 = geo.polygon_bounds(self.footprint_hull)
        return x1 - x0, y1 - y0


@dataclass(frozen=True)
class QueryFilter:
    color: str | None = None
    tags: frozenset[str] = frozenset()
    room_category: str | None = None
    min_affinity: float = 0.0
    max_footprint: tuple[float, float] | None = None

    def is_empty(self) -> bool:
        return (self.color is None and not self.tags
                and self.room_category is None and self.max_footprint is None)

    def admits(self, rec: ModelRecord) -> bool:
        if self.color is not None and self.color not in {c for c, _ in rec.color_materials}:
            return False
        if self.tags and not self.tags <= set(rec.tags):
            return False
        if self.room_category is not None:
            if rec.room_affinity.get(self.room_category, 0.0) < self.min_affinity:
                return False
            if self.min_affinity == 0.0 and rec.room_affinity.get(self.room_category, 0.0) <= 0.0:
                return False
        if self.max_footprint is not None:
            w, d = rec.footprint_extent
            mw, md = self.max_footprint
            fits = (w <= mw + 1e-9 and d <= md + 1e-9) or (d <= mw + 1e-9 and w <= md + 1e-9)
            if not fits:
                return False
        return True


@dataclass
class ModelBundle:
    format_version: int
    records: dict[str, ModelRecord]
    ids: list[str]                # sorted; row order of the vector matrix
    vectors: np.ndarray           # (N, EMBED_DIM)
    path: Path | None = None      # source archive, for payload access

    def payload(self, model_id: str) -> bytes:
        if self.path is None:
            raise ValidationError("bundle has no backing archive")
        rec = self.records[model_id]
        with zipfile.ZipFile(self.path) as zf:
            return zf.read(rec.payload_ref)


def _record_to_dict(rec: ModelRecord, vector: np.ndarray) -> dict:
    return {
        "id": rec.id,
        "description": rec.description,
        "footprint_hull": [[round(x, 6), round(y, 6)] for x, y in rec.footprint_hull],
        "height": rec.height,
        "color_materials": [list(cm) for cm in rec.color_materials],
        "room_affinity": {k: rec.room_affinity[k] for k in sorted(rec.room_affinity)},
        "tags": list(rec.tags),
        "payload": rec.payload_ref,
        "vector": base64.b64encode(vector.astype("<f4").tobytes()).decode("ascii"),
    }


def _record_from_dict(d: dict) -> tuple[ModelRecord, np.ndarray]:
    rec = ModelRecord(
        id=d["id"],
        description=d["description"],
        footprint_hull=tuple((float(x), float(y)) for x, y in d["footprint_hull"]),
        height=float(d["height"]),
        color_materials=tuple((c, m) for c, m in d["color_materials"]),
        room_affinity={k: float(v) for k, v in d["room_affinity"].items()},
        tags=tuple(d["tags"]),
        payload_ref=d["payload"],
    )
    vec = np.frombuffer(base64.b64decode(d["vector"]), dtype="<f4").astype(np.float64)
    return rec, vec


def _load_manifest(path: Path) -> dict:
    try:
        doc = json.loads(path.read_text("utf-8"))
    except (json.JSONDecodeError, OSError) as exc:
        raise ManifestError(f"{path}: {exc}") from exc
    required = {"id", "description", "footprint_points", "height",
                "color_materials", "room_affinity", "tags", "payload"}
    missing = required - set(doc)
    if missing:
        raise ManifestError(f"{path}: missing keys {sorted(missing)}")
    return doc


def build_bundle(manifest_dir: str | Path, out_path: str | Path) -> Path:
    """Process a manifest directory into a compressed queriable bundle."""
    manifest_dir = Path(manifest_dir)
    out_path = Path(out_path)
    seen: dict[str, Path] = {}
    entries: list[tuple[ModelRecord, np.ndarray, bytes]] = []
    for path in sorted(manifest_dir.glob("*.json")):
        doc = _load_manifest(path)
        mid = str(doc["id"])
        if mid in seen:
            raise DuplicateId(f"id {mid!r} in both {seen[mid]} and {path}")
        seen[mid] = path
        try:
            hull = geo.convex_hull_2d([(float(x), float(y)) for x, y in doc["footprint_points"]])
            rec = ModelRecord(
                id=mid,
                description=str(doc["description"]),
                footprint_hull=tuple(hull),
                height=float(doc["height"]),
                color_materials=tuple((str(c), str(m)) for c, m in doc["color_materials"]),
                room_affinity={str(k): float(v) for k, v in doc["room_affinity"].items()},
                tags=tuple(str(t) for t in doc["tags"]),
                payload_ref=f"payload/{mid}.bin",
            )
        except (ValidationError, ValueError, TypeError) as exc:
            raise ManifestError(f"{path}: {exc}") from exc
        blob_path = manifest_dir / str(doc["payload"])
        if not blob_path.is_file():
            raise ManifestError(f"{path}: payload {doc['payload']!r} not found")
        entries.append((rec, embed_text(rec.description), blob_path.read_bytes()))

    entries.sort(key=lambda e: e[0].id)
    index = {
        "format_version": FORMAT_VERSION,
        "records": [_record_to_dict(rec, vec) for rec, vec, _ in entries],
    }
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with zipfile.ZipFile(out_path, "w") as zf:
        info = zipfile.ZipInfo("index.json", date_time=_ZIP_DATE)
        info.compress_type = zipfile.ZIP_DEFLATED
        zf.writestr(info, json.dumps(index, indent=2, ensure_ascii=False) + "\n")
        for rec, _, blob in entries:
            info = zipfile.ZipInfo(rec.payload_ref, date_time=_ZIP_DATE)
            info.compress_type = zipfile.ZIP_DEFLATED
            zf.writestr(info, blob)
    return out_path


def load_bundle(path: str | Path) -> ModelBundle:
    path = Path(path)
    with zipfile.ZipFile(path) as zf:
        index = json.loads(zf.read("index.json"))
    if index.get("format_version") != FORMAT_VERSION:
        raise ValidationError(f"unsupported bundle format {index.get('format_version')!r}")
    records: dict[str, ModelRecord] = {}
    vectors = []
    for d in index["records"]:
        rec, vec = _record_from_dict(d)
        records[rec.id] = rec
        vectors.append(vec)
    ids = [d["id"] for d in index["records"]]
    matrix = np.vstack(vectors) if vectors else np.zeros((0, EMBED_DIM))
    return ModelBundle(format_version=FORMAT_VERSION, records=records,
                       ids=ids, vectors=matrix, path=path)


def query(bundle: ModelBundle, text: str, qfilter: QueryFilter | None = None,
          k: int = 5) -> list[tuple[ModelRecord, float]]:
    """Filtered cosine ranking; ties broken by ascending id.

    An empty result is a valid empty list. Each hit carries the complete
    record, so one call returns all annotations.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    qfilter = qfilter or QueryFilter()
    if not text and qfilter.is_empty():
        raise ValidationError("need a text query or at least one filter")
    qvec = embed_text(text)
    scores = bundle.vectors @ qvec if len(bundle.ids) else np.zeros(0)
    hits = [
        (bundle.records[mid], float(scores[i]))
        for i, mid in enumerate(bundle.ids)
        if qfilter.admits(bundle.records[mid])
    ]
    hits.sort(key=lambda h: (-h[1], h[0].id))
    return hits[:k]
