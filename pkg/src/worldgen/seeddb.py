"""Synthetic default database content: procedurally authored manifests.

Ships parametric descriptions and footprints instead of third-party meshes.
Every record's description is a unique token bag, so exact-description
queries are unambiguous. Generation is fully deterministic.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

from .modeldb import build_bundle

_COLORS = ["red", "blue", "green", "white", "black", "gray",
           "oak-brown", "beige", "yellow"]

_CONTEXT_ROOMS = {
    "hospital": ["ward", "corridor", "exam-room", "waiting-area", "nurse-station", "storage", "lab"],
    "residential": ["living-room", "kitchen", "bedroom", "bathroom", "hallway", "study", "storage"],
    "office": ["office", "meeting-room", "open-plan", "kitchenette", "corridor", "reception", "storage"],
    "generic": ["room", "hall", "corridor", "storage"],
}

# name, (w, d), height, material, contexts, high-affinity rooms
_ARCHETYPES = [
    ("hospital bed", (1.0, 2.1), 0.6, "metal", ["hospital"], ["ward"]),
    ("wheelchair", (0.7, 1.1), 0.9, "metal", ["hospital"], ["ward", "corridor"]),
    ("iv stand", (0.5, 0.5), 1.8, "metal", ["hospital"], ["ward", "exam-room"]),
    ("medical cabinet", (0.9, 0.5), 1.8, "metal", ["hospital"], ["exam-room", "lab", "storage"]),
    ("visitor chair", (0.55, 0.55), 0.9, "plastic", ["hospital"], ["waiting-area", "ward"]),
    ("examination table", (0.8, 1.9), 0.8, "metal", ["hospital"], ["exam-room"]),
    ("supply cart", (0.6, 0.9), 1.0, "metal", ["hospital"], ["storage", "corridor"]),
    ("waiting bench", (1.6, 0.6), 0.45, "wood", ["hospital"], ["waiting-area"]),
    ("sofa", (2.0, 0.9), 0.8, "fabric", ["residential"], ["living-room"]),
    ("dining table", (1.6, 0.9), 0.75, "wood", ["residential"], ["kitchen", "living-room"]),
    ("chair", (0.5, 0.5), 0.9, "wood", ["residential", "generic"], ["kitchen", "room"]),
    ("double bed", (1.6, 2.0), 0.5, "fabric", ["residential"], ["bedroom"]),
    ("wardrobe", (1.2, 0.6), 2.0, "wood", ["residential"], ["bedroom"]),
    ("bookshelf", (0.9, 0.35), 1.8, "wood", ["residential", "office"], ["study", "office"]),
    ("coffee table", (1.0, 0.6), 0.45, "wood", ["residential"], ["living-room"]),
    ("potted plant", (0.4, 0.4), 1.2, "ceramic", ["residential", "office"], ["living-room", "reception"]),
    ("office desk", (1.4, 0.7), 0.75, "wood", ["office"], ["office", "open-plan"]),
    ("office chair", (0.6, 0.6), 0.95, "fabric", ["office"], ["office", "open-plan"]),
    ("filing cabinet", (0.5, 0.6), 1.3, "metal", ["office"], ["office", "storage"]),
    ("meeting table", (2.0, 1.0), 0.75, "wood", ["office"], ["meeting-room"]),
    ("whiteboard", (1.5, 0.3), 1.9, "plastic", ["office"], ["meeting-room"]),
    ("printer stand", (0.7, 0.6), 1.0, "metal", ["office"], ["open-plan", "corridor"]),
    ("table", (1.2, 0.8), 0.75, "wood", ["generic"], ["room", "hall"]),
    ("storage box", (0.6, 0.6), 0.6, "plastic", ["generic"], ["storage"]),
    ("shelf", (0.9, 0.35), 1.5, "metal", ["generic"], ["storage", "room"]),
    ("bench", (1.4, 0.5), 0.45, "wood", ["generic"], ["hall", "corridor"]),
    ("crate", (0.8, 0.8), 0.8, "wood", ["generic"], ["storage"]),
]

_HUMANS = [
    "adult man walking", "adult woman walking", "adult man standing",
    "adult woman standing", "elderly man walking", "elderly woman walking",
    "child walking", "child standing", "nurse walking", "doctor standing",
    "office worker walking", "office worker standing", "patient in wheelchair",
    "visitor standing", "teenager walking", "worker carrying box",
]


def _box_mesh(w: float, d: float, h: float) -> bytes:
    """Axis-aligned box as little-endian float32 triangle soup."""
    x, y = w / 2, d / 2
    v = [(-x, -y, 0), (x, -y, 0), (x, y, 0), (-x, y, 0),
         (-x, -y, h), (x, -y, h), (x, y, h), (-x, y, h)]
    quads = [(0, 1, 2, 3), (4, 7, 6, 5), (0, 4, 5, 1),
             (1, 5, 6, 2), (2, 6, 7, 3), (3, 7, 4, 0)]
    floats: list[float] = []
    for a, b, c, d4 in quads:
        for tri in ((a, b, c), (a, c, d4)):
            for i in tri:
                floats.extend(v[i])
    return struct.pack(f"<{len(floats)}f", *floats)


def _rect_points(w: float, d: float) -> list[list[float]]:
    x, y = round(w / 2, 4), round(d / 2, 4)
    return [[-x, -y], [x, -y], [x, y], [-x, y]]


def _octagon_points(r: float) -> list[list[float]]:
    s = round(r * 0.4142, 4)
    r = round(r, 4)
    return [[-s, -r], [s, -r], [r, -s], [r, s], [s, r], [-s, r], [-r, s], [-r, -s]]


def generate_seed_manifests(out_dir: str | Path) -> Path:
    """Write the default manifest set: 108 obstacles, 16 human models."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "blobs").mkdir(exist_ok=True)

    def write(manifest: dict, blob: bytes) -> None:
        mid = manifest["id"]
        (out_dir / "blobs" / f"{mid}.bin").write_bytes(blob)
        manifest["payload"] = f"blobs/{mid}.bin"
        (out_dir / f"{mid}.json").write_text(
            json.dumps(manifest, indent=2) + "\n", "utf-8"
        )

    for i, (name, (w, d), h, material, contexts, prime_rooms) in enumerate(_ARCHETYPES):
        affinity: dict[str, float] = {}
        for ctx in contexts:
            for cat in _CONTEXT_ROOMS[ctx]:
                affinity[cat] = 0.3
        for cat in prime_rooms:
            affinity[cat] = 0.9
        for j in range(4):
            color = _COLORS[(i * 2 + j) % len(_COLORS)]
            slug = name.replace(" ", "-")
            write(
                {
                    "id": f"obs-{slug}-{color}",
                    "description": f"{color} {material} {name}",
                    "footprint_points": _rect_points(w, d),
                    "height": h,
                    "color_materials": [[color, material]],
                    "room_affinity": affinity,
                    "tags": ["obstacle"] + contexts,
                },
                _box_mesh(w, d, h),
            )

    human_affinity = {
        cat: 0.5 for rooms in _CONTEXT_ROOMS.values() for cat in rooms
    }
    for i, desc in enumerate(_HUMANS):
        color = _COLORS[i % len(_COLORS)]
        slug = desc.replace(" ", "-")
        write(
            {
                "id": f"hum-{slug}",
                "description": desc,
                "footprint_points": _octagon_points(0.25),
                "height": 1.75 if "child" not in desc else 1.2,
                "color_materials": [[color, "fabric"]],
                "room_affinity": human_affinity,
                "tags": ["human"],
            },
            _box_mesh(0.5, 0.5, 1.75),
        )
    return out_dir


def build_default_bundle(out_path: str | Path, work_dir: str | Path | None = None) -> Path:
    """Generate the seed manifests and build them into a bundle."""
    import tempfile

    out_path = Path(out_path)
    if work_dir is not None:
        manifest_dir = generate_seed_manifests(work_dir)
        return build_bundle(manifest_dir, out_path)
    with tempfile.TemporaryDirectory() as tmp:
        manifest_dir = generate_seed_manifests(tmp)
        return build_bundle(manifest_dir, out_path)
