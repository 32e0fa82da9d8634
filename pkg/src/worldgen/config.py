"""Calibration constants, loadable from a user config file.

Documented keys: rooms_per_level, assets_base, assets_slope,
extra_edge_fraction, pedestrians_per_level, plus context weight/category/role
tables. Unknown keys in an override file are rejected to catch typos.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .errors import ValidationError


def default_calibration() -> dict:
    text = resources.files("worldgen.data").joinpath("calibration.json").read_text("utf-8")
    return json.loads(text)


def load_calibration(path: str | Path | None = None) -> dict:
    """Defaults merged with an optional JSON override file."""
    cal = default_calibration()
    if path is None:
        return cal
    overrides = json.loads(Path(path).read_text("utf-8"))
    unknown = set(overrides) - set(cal)
    if unknown:
        raise ValidationError(f"unknown calibration keys: {sorted(unknown)}")
    cal.update(overrides)
    return cal
