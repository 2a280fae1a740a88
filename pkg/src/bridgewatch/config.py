"""Configuration blocks for the vessel model, planner, probe and service.

Every tunable lives here with its default; a JSON config file (or keyword
overrides in tests) may replace any subset.  Blocks are frozen dataclasses
so a config object can be shared between sessions without defensive copies.
"""
from __future__ import annotations

import dataclasses
import json
import math
import os
from dataclasses import dataclass, field
from typing import Any, Mapping

from .errors import BridgewatchError


class ConfigError(BridgewatchError):
    """Bad config file or override value."""


@dataclass(frozen=True)
class VesselConfig:
    max_speed: float = 17.0             # m/s, small dual-engine patrol craft
    course_time_constant: float = 3.0   # s, first-order course lag
    speed_time_constant: float = 5.0    # s, first-order speed lag
    max_substep: float = 0.1            # s, forward-Euler integration cap


@dataclass(frozen=True)
class GuidanceConfig:
    lookahead: float = 40.0             # m, lookahead distance for LOS steering
    acceptance_radius: float = 20.0     # m, default waypoint switch radius


@dataclass(frozen=True)
class EncounterConfig:
    # relative-bearing / course-difference sector limits (degrees)
    head_on_bearing_deg: float = 22.5
    crossing_bearing_deg: float = 112.5
    reciprocal_course_deg: float = 157.5
    overtaking_bearing_deg: float = 45.0
    overtaking_course_deg: float = 22.5
    close_range: float = 500.0          # m, CPA gate for "encounter applies"
    risk_horizon: float = 120.0         # s, window for the CPA gate


@dataclass(frozen=True)
class PlannerConfig:
    course_offset_span_deg: float = 90.0    # offsets run -span..+span
    course_offset_step_deg: float = 15.0
    speed_multipliers: tuple[float, ...] = (1.0, 0.5, 0.0)
    horizon: float = 120.0              # s, rollout length
    dt: float = 1.0                     # s, rollout sample step
    return_time: float = 60.0           # s, offset active before return-to-path
    replan_interval: float = 5.0        # s, receding-horizon period
    # collision risk term
    collision_weight: float = 10.0
    safe_distance: float = 50.0         # m
    proximity_exponent: float = 4.0
    risk_decay_time: float = 30.0       # s, discounts far-future proximity
    min_range: float = 1.0              # m, distance floor inside the risk term
    # rule compliance term
    colreg_weight: float = 50.0
    crossing_margin: float = 30.0       # s, "crosses ahead" time margin
    # maneuver-quality terms
    transition_weight: float = 5.0
    speed_dev_weight: float = 8.0
    course_dev_weight: float = 4.0
    speed_change_weight: float = 2.0
    course_change_weight: float = 2.0


@dataclass(frozen=True)
class ProbeConfig:
    step: float = 5.0                   # s, spacing of ahead-of-time replans
    time_limit: float = 120.0           # s, how far ahead the probe looks


@dataclass(frozen=True)
class SessionConfig:
    tick: float = 0.5                   # s, live session step
    duration: float = 200.0             # s, headless/auto-pause run length


@dataclass(frozen=True)
class ServerConfig:
    port: int = 8000
    scenario_dir: str | None = None     # None -> bundled scenarios
    realtime_factor: float = 1.0        # >1 plays faster than wall clock
    ui_dir: str | None = None           # static frontend bundle, if built


_BLOCKS = {
    "vessel": VesselConfig,
    "guidance": GuidanceConfig,
    "encounter": EncounterConfig,
    "planner": PlannerConfig,
    "probe": ProbeConfig,
    "session": SessionConfig,
    "server": ServerConfig,
}


@dataclass(frozen=True)
class Config:
    vessel: VesselConfig = field(default_factory=VesselConfig)
    guidance: GuidanceConfig = field(default_factory=GuidanceConfig)
    encounter: EncounterConfig = field(default_factory=EncounterConfig)
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    probe: ProbeConfig = field(default_factory=ProbeConfig)
    session: SessionConfig = field(default_factory=SessionConfig)
    server: ServerConfig = field(default_factory=ServerConfig)

    def __post_init__(self) -> None:
        p, s = self.planner, self.session
        if p.dt <= 0 or p.horizon <= 0 or p.return_time <= 0:
            raise ConfigError("planner horizon, dt and return_time must be positive")
        if p.return_time > p.horizon:
            raise ConfigError("planner return_time must not exceed the horizon")
        if not _divides(s.tick, p.dt):
            raise ConfigError("planner dt must be an integer number of session ticks")
        if not _divides(s.tick, p.replan_interval):
            raise ConfigError("replan interval must be an integer number of session ticks")
        if not _divides(p.dt, p.replan_interval):
            raise ConfigError("replan interval must be an integer number of planner steps")
        if not _divides(self.probe.step, self.probe.time_limit):
            raise ConfigError("probe time limit must be a multiple of the probe step")
        if not _divides(p.dt, self.probe.step):
            raise ConfigError("probe step must be an integer number of planner steps")
        if p.course_offset_step_deg <= 0 or p.course_offset_span_deg < 0:
            raise ConfigError("course offset grid must have positive step and span")
        if p.course_offset_span_deg > 0 and not _divides(
                p.course_offset_step_deg, p.course_offset_span_deg):
            raise ConfigError("course offset span must be a multiple of the step "
                              "(the zero offset must sit on the grid)")
        if 1.0 not in p.speed_multipliers:
            raise ConfigError("speed multipliers must include 1.0 (the nominal)")

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "Config":
        kwargs: dict[str, Any] = {}
        for key, sub in raw.items():
            block = _BLOCKS.get(key)
            if block is None:
                raise ConfigError(f"{key}: unknown config section")
            if not isinstance(sub, Mapping):
                raise ConfigError(f"{key}: expected an object of overrides")
            names = {f.name for f in dataclasses.fields(block)}
            for name in sub:
                if name not in names:
                    raise ConfigError(f"{key}.{name}: unknown config field")
            values = dict(sub)
            if "speed_multipliers" in values:
                values["speed_multipliers"] = tuple(values["speed_multipliers"])
            kwargs[key] = block(**values)
        return cls(**kwargs)


def _divides(small: float, big: float) -> bool:
    if small <= 0 or big <= 0:
        return False
    ratio = big / small
    return abs(ratio - round(ratio)) < 1e-9 and round(ratio) >= 1


def load_config(path: str | None = None,
                env: Mapping[str, str] | None = None) -> Config:
    """Build a Config from an optional JSON file plus environment overrides.

    BRIDGEWATCH_PORT and BRIDGEWATCH_SCENARIO_DIR override the server block;
    explicit CLI flags are applied by the caller on top of this.
    """
    env = os.environ if env is None else env
    raw: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
    cfg = Config.from_dict(raw)
    server = cfg.server
    if env.get("BRIDGEWATCH_PORT"):
        try:
            server = dataclasses.replace(server, port=int(env["BRIDGEWATCH_PORT"]))
        except ValueError as exc:
            raise ConfigError("BRIDGEWATCH_PORT must be an integer") from exc
    if env.get("BRIDGEWATCH_SCENARIO_DIR"):
        server = dataclasses.replace(server, scenario_dir=env["BRIDGEWATCH_SCENARIO_DIR"])
    if server is not cfg.server:
        cfg = dataclasses.replace(cfg, server=server)
    return cfg


def course_offsets(cfg: PlannerConfig) -> tuple[float, ...]:
    """Candidate course offsets in radians, ascending port to starboard."""
    span, step = cfg.course_offset_span_deg, cfg.course_offset_step_deg
    count = int(round(2 * span / step)) + 1
    return tuple(math.radians(-span + k * step) for k in range(count))
