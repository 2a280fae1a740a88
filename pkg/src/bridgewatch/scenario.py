"""Scenario documents, obstacle prediction, CPA geometry and encounter rules.

Scenario files are JSON with angles in degrees; everything internal is
radians.  Obstacle tracks are constant course and speed for the whole run,
which keeps prediction closed-form and replays exact.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping

from .config import EncounterConfig
from .errors import ScenarioError
from .vessel import VesselState, Waypoint, wrap_angle

MAX_SPEED = 17.0  # m/s, upper bound accepted from scenario files


class Characteristic(Enum):
    """Supervisor-facing flavor of the alternative (foil) maneuver."""
    REDUCED_SPEED = "reduced_speed"
    PORT_TURN = "port_turn"
    STARBOARD_TURN = "starboard_turn"
    CLOSER_TO_ROUTE = "closer_to_route"
    FARTHER_FROM_ROUTE = "farther_from_route"


class EncounterType(Enum):
    HEAD_ON = "head_on"
    CROSSING_GIVE_WAY = "crossing_give_way"
    CROSSING_STAND_ON = "crossing_stand_on"
    OVERTAKING = "overtaking"
    SAFE = "safe"


@dataclass(frozen=True)
class ObstacleTrack:
    """A target vessel on constant course and speed."""
    id: str
    state: VesselState
    length: float = 8.0
    width: float = 3.0


@dataclass(frozen=True)
class CpaResult:
    distance: float  # m at the closest point of approach
    time: float      # s from now, clamped to [0, horizon]


@dataclass(frozen=True)
class Scenario:
    id: str
    title: str
    ownship: VesselState
    route: tuple[Waypoint, ...]
    cruise_speed: float
    obstacles: tuple[ObstacleTrack, ...]
    foil_characteristic: Characteristic
    description: str = ""


# ---------------------------------------------------------------- loading

def load_scenario(document: str | Mapping[str, Any]) -> Scenario:
    """Parse and validate a scenario document (JSON text or parsed dict).

    Raises ScenarioError naming the offending field path on any problem,
    including unknown keys.
    """
    if isinstance(document, str):
        try:
            raw = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"not valid JSON: {exc}") from exc
    else:
        raw = document
    if not isinstance(raw, Mapping):
        raise ScenarioError("scenario must be a JSON object")

    allowed = {"id", "title", "ownship", "route", "cruise_speed",
               "obstacles", "foil_characteristic", "description"}
    for key in raw:
        if key not in allowed:
            raise ScenarioError(f"{key}: unknown field")

    sid = _string(raw, "id")
    title = _string(raw, "title")
    description = _string(raw, "description", default="")

    own_raw = _object(raw, "ownship")
    ownship = _vessel_state("ownship", own_raw,
                            {"north", "east", "course_deg", "speed"})

    route_raw = _array(raw, "route")
    if len(route_raw) < 2:
        raise ScenarioError("route: must contain at least two waypoints")
    route = tuple(_waypoint(f"route[{i}]", wp) for i, wp in enumerate(route_raw))

    cruise = _number(raw, "cruise_speed")
    if not 0.0 < cruise <= MAX_SPEED:
        raise ScenarioError(f"cruise_speed: must be in (0, {MAX_SPEED}], got {cruise}")

    obstacles_raw = _array(raw, "obstacles")
    obstacles = []
    seen_ids: set[str] = set()
    for i, ob in enumerate(obstacles_raw):
        track = _obstacle(f"obstacles[{i}]", ob)
        if track.id in seen_ids:
            raise ScenarioError(f"obstacles[{i}].id: duplicate id {track.id!r}")
        seen_ids.add(track.id)
        obstacles.append(track)

    char_raw = _string(raw, "foil_characteristic")
    try:
        characteristic = Characteristic(char_raw)
    except ValueError:
        options = ", ".join(c.value for c in Characteristic)
        raise ScenarioError(
            f"foil_characteristic: must be one of {options}, got {char_raw!r}") from None

    return Scenario(sid, title, ownship, route, cruise, tuple(obstacles),
                    characteristic, description)


def _object(raw: Mapping[str, Any], key: str) -> Mapping[str, Any]:
    if key not in raw:
        raise ScenarioError(f"{key}: required field missing")
    val = raw[key]
    if not isinstance(val, Mapping):
        raise ScenarioError(f"{key}: expected an object")
    return val


def _array(raw: Mapping[str, Any], key: str) -> list:
    if key not in raw:
        raise ScenarioError(f"{key}: required field missing")
    val = raw[key]
    if not isinstance(val, list):
        raise ScenarioError(f"{key}: expected an array")
    return val


def _string(raw: Mapping[str, Any], key: str, default: str | None = None) -> str:
    if key not in raw:
        if default is not None:
            return default
        raise ScenarioError(f"{key}: required field missing")
    val = raw[key]
    if not isinstance(val, str) or (not val and default is None):
        raise ScenarioError(f"{key}: expected a non-empty string")
    return val


def _number(raw: Mapping[str, Any], key: str, path: str | None = None) -> float:
    path = path or key
    if key not in raw:
        raise ScenarioError(f"{path}: required field missing")
    val = raw[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ScenarioError(f"{path}: expected a number")
    val = float(val)
    if not math.isfinite(val):
        raise ScenarioError(f"{path}: must be finite")
    return val


def _vessel_state(path: str, raw: Mapping[str, Any], allowed: set[str]) -> VesselState:
    for key in raw:
        if key not in allowed:
            raise ScenarioError(f"{path}.{key}: unknown field")
    north = _number(raw, "north", f"{path}.north")
    east = _number(raw, "east", f"{path}.east")
    course = wrap_angle(math.radians(_number(raw, "course_deg", f"{path}.course_deg")))
    speed = _number(raw, "speed", f"{path}.speed")
    if not 0.0 <= speed <= MAX_SPEED:
        raise ScenarioError(f"{path}.speed: must be in [0, {MAX_SPEED}], got {speed}")
    return VesselState(0.0, north, east, course, speed)


def _waypoint(path: str, raw: Any) -> Waypoint:
    if not isinstance(raw, Mapping):
        raise ScenarioError(f"{path}: expected an object")
    for key in raw:
        if key not in {"north", "east", "acceptance_radius"}:
            raise ScenarioError(f"{path}.{key}: unknown field")
    north = _number(raw, "north", f"{path}.north")
    east = _number(raw, "east", f"{path}.east")
    if "acceptance_radius" in raw:
        radius = _number(raw, "acceptance_radius", f"{path}.acceptance_radius")
        if radius <= 0:
            raise ScenarioError(f"{path}.acceptance_radius: must be positive")
    else:
        radius = 20.0
    return Waypoint(north, east, radius)


def _obstacle(path: str, raw: Any) -> ObstacleTrack:
    if not isinstance(raw, Mapping):
        raise ScenarioError(f"{path}: expected an object")
    allowed = {"id", "north", "east", "course_deg", "speed", "length", "width"}
    for key in raw:
        if key not in allowed:
            raise ScenarioError(f"{path}.{key}: unknown field")
    oid = raw.get("id")
    if not isinstance(oid, str) or not oid:
        raise ScenarioError(f"{path}.id: expected a non-empty string")
    state = _vessel_state(path, {k: raw[k] for k in raw
                                 if k in {"north", "east", "course_deg", "speed"}},
                          {"north", "east", "course_deg", "speed"})
    length = _number(raw, "length", f"{path}.length") if "length" in raw else 8.0
    width = _number(raw, "width", f"{path}.width") if "width" in raw else 3.0
    if length <= 0 or width <= 0:
        raise ScenarioError(f"{path}: length and width must be positive")
    return ObstacleTrack(oid, state, length, width)


# ------------------------------------------------------------- kinematics

def advance_track(track: ObstacleTrack, dt: float) -> ObstacleTrack:
    """Obstacle state ``dt`` seconds later (constant course and speed)."""
    s = track.state
    vn, ve = s.velocity()
    moved = VesselState(s.time + dt, s.north + vn * dt, s.east + ve * dt,
                        s.course, s.speed)
    return replace(track, state=moved)


def predict_obstacle(track: ObstacleTrack, horizon: float, dt: float) -> tuple[VesselState, ...]:
    """Constant-velocity prediction sampled at 0, dt, ..., horizon."""
    if not horizon > 0 or not dt > 0:
        raise ValueError("horizon and dt must be positive")
    steps = int(math.floor(horizon / dt + 1e-9))
    s = track.state
    vn, ve = s.velocity()
    return tuple(VesselState(s.time + k * dt, s.north + vn * (k * dt),
                             s.east + ve * (k * dt), s.course, s.speed)
                 for k in range(steps + 1))


def cpa(own: VesselState, obstacle: VesselState, horizon: float) -> CpaResult:
    """Closest point of approach for two constant-velocity tracks.

    The minimizer is clamped to [0, horizon]; for parallel tracks with zero
    relative speed the earliest minimizer (t=0) is reported.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    rn = obstacle.north - own.north
    re = obstacle.east - own.east
    ovn, ove = own.velocity()
    tvn, tve = obstacle.velocity()
    vn, ve = tvn - ovn, tve - ove
    v2 = vn * vn + ve * ve
    if v2 <= 0.0:
        t = 0.0
    else:
        t = -(rn * vn + re * ve) / v2
        t = min(max(t, 0.0), horizon)
    return CpaResult(math.hypot(rn + vn * t, re + ve * t), t)


def relative_bearing(own: VesselState, target: VesselState) -> float:
    """Bearing of ``target`` relative to own course, (-pi, pi], starboard positive."""
    absolute = math.atan2(target.east - own.east, target.north - own.north)
    return wrap_angle(absolute - own.course)


def classify_encounter(own: VesselState, obstacle: VesselState,
                       encounter: EncounterConfig = EncounterConfig()) -> EncounterType:
    """COLREG-style situation assessment for one target.

    Head-on and overtaking are sector tests on relative bearing and course
    difference; the crossing classes additionally require the tracks to pass
    within close range over the risk horizon.  Stand-on holds when the target
    is in the port crossing sector or when the target itself would classify
    us as its give-way vessel (keeps the two assessments symmetric).
    """
    bearing = relative_bearing(own, obstacle)
    if _head_on(own, obstacle, bearing, encounter):
        return EncounterType.HEAD_ON
    if _overtaking(own, obstacle, bearing, encounter):
        return EncounterType.OVERTAKING
    if cpa(own, obstacle, encounter.risk_horizon).distance >= encounter.close_range:
        return EncounterType.SAFE
    head = math.radians(encounter.head_on_bearing_deg)
    cross = math.radians(encounter.crossing_bearing_deg)
    if head < bearing <= cross:
        return EncounterType.CROSSING_GIVE_WAY
    if -cross <= bearing < -head:
        return EncounterType.CROSSING_STAND_ON
    reverse = relative_bearing(obstacle, own)
    if (not _head_on(obstacle, own, reverse, encounter)
            and not _overtaking(obstacle, own, reverse, encounter)
            and head < reverse <= cross):
        return EncounterType.CROSSING_STAND_ON
    return EncounterType.SAFE


def _head_on(own: VesselState, obstacle: VesselState, bearing: float,
             cfg: EncounterConfig) -> bool:
    dpsi = wrap_angle(obstacle.course - own.course)
    return (abs(bearing) <= math.radians(cfg.head_on_bearing_deg)
            and abs(dpsi) >= math.radians(cfg.reciprocal_course_deg))


def _overtaking(own: VesselState, obstacle: VesselState, bearing: float,
                cfg: EncounterConfig) -> bool:
    dpsi = wrap_angle(obstacle.course - own.course)
    return (abs(bearing) <= math.radians(cfg.overtaking_bearing_deg)
            and abs(dpsi) <= math.radians(cfg.overtaking_course_deg)
            and own.speed > obstacle.speed)


# ----------------------------------------------------------------- store

class ScenarioStore:
    """Read-only collection of scenarios, from a directory or the bundle."""

    def __init__(self, scenarios: Iterable[Scenario]):
        self._by_id: dict[str, Scenario] = {}
        for sc in scenarios:
            if sc.id in self._by_id:
                raise ScenarioError(f"duplicate scenario id {sc.id!r}")
            self._by_id[sc.id] = sc

    @classmethod
    def bundled(cls) -> "ScenarioStore":
        root = resources.files(__package__) / "scenarios"
        docs = sorted(p for p in root.iterdir() if p.name.endswith(".json"))
        return cls(load_scenario(p.read_text(encoding="utf-8")) for p in docs)

    @classmethod
    def from_dir(cls, path: str | Path) -> "ScenarioStore":
        root = Path(path)
        if not root.is_dir():
            raise ScenarioError(f"scenario directory not found: {root}")
        scenarios = []
        for p in sorted(root.glob("*.json")):
            try:
                scenarios.append(load_scenario(p.read_text(encoding="utf-8")))
            except ScenarioError as exc:
                raise ScenarioError(f"{p.name}: {exc}") from exc
        if not scenarios:
            raise ScenarioError(f"no scenario files in {root}")
        return cls(scenarios)

    def ids(self) -> list[str]:
        return sorted(self._by_id)

    def get(self, scenario_id: str) -> Scenario:
        try:
            return self._by_id[scenario_id]
        except KeyError:
            raise ScenarioError(f"unknown scenario id {scenario_id!r}") from None

    def __iter__(self):
        return iter(self._by_id[sid] for sid in self.ids())

    def __len__(self) -> int:
        return len(self._by_id)
