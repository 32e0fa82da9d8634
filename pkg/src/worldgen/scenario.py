"""Pedestrian scenario generation: spawn/goal sampling from free space.

Agents get context-dependent roles, one of six behavior tokens, and goal
sequences constrained to rooms of the (connected) realized graph so every
scenario is navigable by construction. Output serializes to a YAML schema
with agents carrying init_pose, goals, and interactions.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import yaml

from . import geometry as geo
from .config import default_calibration
from .errors import NoFreeSpace
from .layout import FloorPlan
from .populate import Placement
from .prompting import DifficultyTargets

BEHAVIORS = ("regular", "impassive", "surprised", "scared", "curious", "threatening")
AGENT_CLEARANCE = 0.3  # meters from walls and placed hulls
MAX_SAMPLE_ATTEMPTS = 1000
CONVERSE_PAIR_FRACTION = 0.2
ATTEND_ZONE_PROB = 0.1


@dataclass(frozen=True)
class Interaction:
    kind: str  # converse | queue | attend
    with_agent: str | None = None
    with_zone: str | None = None


@dataclass(frozen=True)
class Agent:
    id: str
    role: str
    behavior: str
    spawn: geo.Point
    goals: tuple[geo.Point, ...]
    interactions: tuple[Interaction, ...] = ()


def sample_point_in_zone(region, obstacles, clearance: float,
                         rng: random.Random) -> geo.Point:
    """Uniform rejection sampling over the region's free space.

    Accepts a point inside the region at least `clearance` from the region
    boundary and from every obstacle hull. Raises NoFreeSpace after
    MAX_SAMPLE_ATTEMPTS rejections.
    """
    x0, y0, x1, y1 = geo.polygon_bounds(region)
    for _ in range(MAX_SAMPLE_ATTEMPTS):
        pt = (rng.uniform(x0, x1), rng.uniform(y0, y1))
        if not geo.point_in_polygon(pt, region, include_boundary=False):
            continue
        if geo.point_polygon_boundary_distance(pt, region) < clearance:
            continue
        if any(geo.point_solid_distance(pt, h) < clearance for h in obstacles):
            continue
        # round for canonical serialization; drift << clearance
        return (round(pt[0], 3), round(pt[1], 3))
    raise NoFreeSpace(f"no free point in region after {MAX_SAMPLE_ATTEMPTS} attempts")


def _weighted_choice(table: dict[str, float], rng: random.Random) -> str:
    names = sorted(table)
    return rng.choices(names, weights=[table[n] for n in names], k=1)[0]


def generate_scenario(fp: FloorPlan, placements: list[Placement],
                      targets: DifficultyTargets, rng: random.Random,
                      calibration: dict | None = None
                      ) -> tuple[list[Agent], list[str]]:
    """Sample targets.pedestrians agents; returns (agents, skipped ids)."""
    cal = calibration or default_calibration()
    roles = cal["role_tables"].get(fp.context, cal["role_tables"]["generic"])
    behaviors = cal["behavior_weights"]
    hulls = [list(p.world_hull) for p in placements]
    rooms = sorted(fp.rooms, key=lambda r: r.room_id)

    agents: list[Agent] = []
    spawn_room: dict[str, str] = {}
    skipped: list[str] = []
    for i in range(targets.pedestrians):
        aid = f"agent-{i:03d}"
        room = rng.choice(rooms)
        try:
            spawn = sample_point_in_zone(room.polygon, hulls, AGENT_CLEARANCE, rng)
            n_goals = rng.randint(2, 4)
            if len(rooms) >= 2:
                others = [r for r in rooms if r.room_id != room.room_id]
                goal_rooms = rng.sample(others, min(n_goals, len(others)))
            else:
                goal_rooms = [room] * n_goals
            goals = tuple(
                sample_point_in_zone(gr.polygon, hulls, AGENT_CLEARANCE, rng)
                for gr in goal_rooms
            )
        except NoFreeSpace:
            skipped.append(aid)
            continue
        interactions: list[Interaction] = []
        if rng.random() < ATTEND_ZONE_PROB:
            interactions.append(Interaction(kind="attend", with_zone=room.room_id))
        agents.append(Agent(
            id=aid,
            role=_weighted_choice(roles, rng),
            behavior=_weighted_choice(behaviors, rng),
            spawn=spawn,
            goals=goals,
            interactions=tuple(interactions),
        ))
        spawn_room[aid] = room.room_id

    # ~20% of same-room agent pairs converse
    enriched: dict[str, list[Interaction]] = {a.id: list(a.interactions) for a in agents}
    for i in range(len(agents)):
        for j in range(i + 1, len(agents)):
            a, b = agents[i], agents[j]
            if spawn_room[a.id] == spawn_room[b.id] and rng.random() < CONVERSE_PAIR_FRACTION:
                enriched[a.id].append(Interaction(kind="converse", with_agent=b.id))
                enriched[b.id].append(Interaction(kind="converse", with_agent=a.id))
    agents = [
        Agent(id=a.id, role=a.role, behavior=a.behavior, spawn=a.spawn,
              goals=a.goals, interactions=tuple(enriched[a.id]))
        for a in agents
    ]
    return agents, skipped


def _interaction_to_dict(it: Interaction) -> dict:
    d: dict = {"kind": it.kind}
    if it.with_agent is not None:
        d["with_agent"] = it.with_agent
    if it.with_zone is not None:
        d["with_zone"] = it.with_zone
    return d


def scenario_to_dict(agents: list[Agent]) -> dict:
    out = []
    for a in agents:
        if a.goals:
            gx, gy = a.goals[0]
            yaw = math.atan2(gy - a.spawn[1], gx - a.spawn[0])
        else:
            yaw = 0.0
        out.append({
            "id": a.id,
            "role": a.role,
            "behavior": a.behavior,
            "init_pose": [round(a.spawn[0], 3), round(a.spawn[1], 3), round(yaw, 3)],
            "goals": [[round(x, 3), round(y, 3)] for x, y in a.goals],
            "interactions": [_interaction_to_dict(it) for it in a.interactions],
        })
    return {"agents": out}


def serialize_scenario(agents: list[Agent]) -> bytes:
    return yaml.safe_dump(scenario_to_dict(agents), sort_keys=False,
                          default_flow_style=None).encode("utf-8")


def scenario_from_dict(doc: dict) -> list[Agent]:
    agents = []
    for a in doc.get("agents", []):
        agents.append(Agent(
            id=a["id"],
            role=a["role"],
            behavior=a["behavior"],
            spawn=(float(a["init_pose"][0]), float(a["init_pose"][1])),
            goals=tuple((float(x), float(y)) for x, y in a["goals"]),
            interactions=tuple(
                Interaction(kind=it["kind"], with_agent=it.get("with_agent"),
                            with_zone=it.get("with_zone"))
                for it in a.get("interactions", [])
            ),
        ))
    return agents


def parse_scenario(data: bytes | str) -> list[Agent]:
    return scenario_from_dict(yaml.safe_load(data))
