"""Prompt parsing and the difficulty <-> (rooms, obstacles) calibration.

This is a deterministic stand-in for a language-model stage: a small regular
pattern set over the prompt text. The text -> GenerationSpec boundary is the
swap point for a learned backend.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .config import default_calibration
from .errors import InvalidLevel, UnparseablePrompt, ValidationError
from .scenegraph import SceneGraph3D

_WORLDS_RE = re.compile(r"(\d+)\s+(?:indoor\s+|random\s+)?worlds?\b", re.IGNORECASE)
_LEVEL_COUNT_RE = re.compile(r"(\d+)\s+difficulty\s+levels?\b", re.IGNORECASE)
_LEVEL_RANGE_RE = re.compile(
    r"difficulty\s+levels?\s+(\d+)\s*(?:-|to)\s*(\d+)", re.IGNORECASE
)
_CONTEXT_KEYWORDS = {
    "hospital": "hospital",
    "clinic": "hospital",
    "residential": "residential",
    "home": "residential",
    "house": "residential",
    "apartment": "residential",
    "office": "office",
}


@dataclass(frozen=True)
class LevelOverride:
    rooms_target: int | None = None
    assets_per_room_target: float | None = None
    pedestrians: int | None = None


@dataclass(frozen=True)
class GenerationSpec:
    context: str = "generic"
    levels: tuple[int, ...] = (1, 2, 3, 4, 5)
    worlds_per_level: int = 1
    seed: int = 0
    overrides: dict[int, LevelOverride] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.levels:
            raise ValidationError("levels must be non-empty")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise ValidationError(f"levels must be strictly increasing: {self.levels}")
        if self.levels[0] < 1:
            raise ValidationError("levels must be >= 1")
        if self.worlds_per_level < 1:
            raise ValidationError("worlds_per_level must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class DifficultyTargets:
    rooms_target: int
    assets_per_room_mean: float
    pedestrians: int
    extra_edge_fraction: float

    def __post_init__(self) -> None:
        if self.rooms_target < 1:
            raise ValidationError("rooms_target must be >= 1")
        if self.pedestrians < 0:
            raise ValidationError("pedestrians must be >= 0")
        if not 0.0 <= self.extra_edge_fraction <= 0.5:
            raise ValidationError("extra_edge_fraction must be in [0, 0.5]")


def parse_prompt(text: str, seed: int = 0, strict: bool = False,
                 worlds_default: int = 1) -> GenerationSpec:
    """Recognize world count, level count/range, and context keywords.

    Lenient mode fills unrecognized fields with defaults so batch scripts
    never abort; strict mode raises when nothing at all is recognized.
    """
    recognized = False

    worlds = worlds_default
    m = _WORLDS_RE.search(text)
    if m:
        worlds = max(1, int(m.group(1)))
        recognized = True

    levels: tuple[int, ...] = (1, 2, 3, 4, 5)
    m = _LEVEL_RANGE_RE.search(text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if lo < 1 or hi < lo:
            raise UnparseablePrompt(f"bad level range {lo}-{hi}")
        levels = tuple(range(lo, hi + 1))
        recognized = True
    else:
        m = _LEVEL_COUNT_RE.search(text)
        if m:
            n = max(1, int(m.group(1)))
            levels = tuple(range(1, n + 1))
            recognized = True

    context = "generic"
    lowered = text.lower()
    for keyword, ctx in _CONTEXT_KEYWORDS.items():
        if re.search(rf"\b{keyword}\b", lowered):
            context = ctx
            recognized = True
            break

    if strict and not recognized:
        raise UnparseablePrompt(f"no recognizable token in {text!r}")
    # the prompt states the total count; spread it across the levels
    per_level = max(1, round(worlds / len(levels)))
    return GenerationSpec(context=context, levels=levels,
                          worlds_per_level=per_level, seed=seed)


def difficulty_targets(context: str, level: int,
                       calibration: dict | None = None) -> DifficultyTargets:
    """Map a difficulty level to generation targets; monotone in level."""
    if level < 1:
        raise InvalidLevel(f"level must be >= 1, got {level}")
    cal = calibration or default_calibration()
    weight = cal["context_pedestrian_weights"].get(context, 1.0)
    return DifficultyTargets(
        rooms_target=cal["rooms_per_level"] * level,
        assets_per_room_mean=cal["assets_base"] + cal["assets_slope"] * level,
        pedestrians=math.ceil(weight * cal["pedestrians_per_level"] * level),
        extra_edge_fraction=cal["extra_edge_fraction"],
    )


def estimate_difficulty(g: SceneGraph3D, calibration: dict | None = None) -> int:
    """Heuristic level estimate: inverse of the rooms-per-level calibration."""
    cal = calibration or default_calibration()
    return max(1, round(len(g.rooms) / cal["rooms_per_level"]))
