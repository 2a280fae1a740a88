"""Live simulation sessions: fixed-step loop, replanning, decisions, traces.

A session owns one scenario run.  It ticks at a fixed step, refreshes the
guidance command at planner-step boundaries, replans on the receding-horizon
interval, and appends every observable event to an in-memory trace.  All
arithmetic is plain accumulation in a fixed order, so identical inputs give
byte-identical traces.
"""
from __future__ import annotations

import math
import uuid
from typing import Any

from .config import Config
from .errors import DecisionConflictError, MissingDecisionPointError
from .explain import ahead_of_time_probe, reselect_foil
from .planner import NOMINAL_OFFSET, PlanResult, WorldView, plan
from .scenario import (Characteristic, ObstacleTrack, Scenario, ScenarioStore,
                       advance_track, classify_encounter, cpa, predict_obstacle,
                       relative_bearing)
from .trace import decision_point_wire, offset_wire, breakdown_wire, vessel_wire
from .vessel import GuidanceCommand, los_guidance, propagate, wrap_angle

PREDICTION_SPACING = 10.0  # s between points of the published obstacle polylines

PLAYBACK_STATES = ("paused", "playing")
DECISIONS = ("pending", "accepted", "declined")


class Session:
    """Mutable state of one supervised run.  Single-threaded by design."""

    def __init__(self, session_id: str, scenario: Scenario, cfg: Config = Config(),
                 characteristic: Characteristic | None = None):
        self.session_id = session_id
        self.scenario = scenario
        self.cfg = cfg
        self.characteristic = characteristic or scenario.foil_characteristic
        self._tick = cfg.session.tick
        self._ticks_per_control = int(round(cfg.planner.dt / self._tick))
        self._ticks_per_replan = int(round(cfg.planner.replan_interval / self._tick))
        self._duration_ticks = int(round(cfg.session.duration / self._tick))
        self.playback = "paused"
        self.decision = "pending"
        self.trace: list[dict[str, Any]] = []
        self._seq = 0
        self.decision_point = None
        self._reset_engine()
        self._emit_tick()
        self._emit_plan(self.current_plan)
        point = ahead_of_time_probe(self._world(), self.ownship, NOMINAL_OFFSET,
                                    self.characteristic, cfg)
        if point is not None:
            self.decision_point = point
            self._emit_explanation()

    # ------------------------------------------------------------ engine

    def _reset_engine(self) -> None:
        """Rebuild the simulation state at the scenario start, silently."""
        self.ownship = self.scenario.ownship
        self.obstacles: list[ObstacleTrack] = list(self.scenario.obstacles)
        self.active_index = 0
        self.tick_count = 0
        self.min_separation = math.inf
        self._update_separation()
        self.current_plan: PlanResult = plan(self._world(), self.ownship,
                                             NOMINAL_OFFSET, self.cfg)
        self.previous_offset = self.current_plan.solution_offset
        self._plan_tick = 0
        self._held_cmd: GuidanceCommand | None = None

    def _world(self) -> WorldView:
        return WorldView(self.scenario.route, self.scenario.cruise_speed,
                         tuple(self.obstacles), self.active_index)

    @property
    def clock(self) -> float:
        return self.ownship.time

    def _control(self) -> GuidanceCommand:
        cmd, self.active_index = los_guidance(self.ownship, self.scenario.route,
                                              self.active_index, self.cfg.guidance,
                                              self.scenario.cruise_speed)
        if self.decision != "declined":
            offset = self.current_plan.solution_offset
            since_plan = (self.tick_count - self._plan_tick) * self._tick
            if since_plan < self.cfg.planner.return_time:
                cmd = GuidanceCommand(wrap_angle(cmd.course_ref + offset.course),
                                      offset.multiplier * cmd.speed_ref)
        return cmd

    def _advance_one_tick(self, emit: bool) -> None:
        if self.tick_count % self._ticks_per_control == 0 or self._held_cmd is None:
            self._held_cmd = self._control()
        self.ownship = propagate(self.ownship, self._held_cmd, self._tick,
                                 self.cfg.vessel)
        self.obstacles = [advance_track(tr, self._tick) for tr in self.obstacles]
        self.tick_count += 1
        self._update_separation()
        if emit:
            self._emit_tick()
        if self.tick_count % self._ticks_per_replan == 0:
            result = plan(self._world(), self.ownship, self.previous_offset, self.cfg)
            self.current_plan = result
            self._plan_tick = self.tick_count
            self.previous_offset = result.solution_offset
            self._held_cmd = None  # refresh the command from the new plan next tick
            if emit:
                self._emit_plan(result)

    def _update_separation(self) -> None:
        own = self.ownship
        for tr in self.obstacles:
            d = math.hypot(tr.state.north - own.north, tr.state.east - own.east)
            if d < self.min_separation:
                self.min_separation = d

    # --------------------------------------------------------------- ops

    def step(self, dt: float | None = None) -> None:
        """Advance one fixed tick; paused sessions record a warning instead."""
        if dt is not None and abs(dt - self._tick) > 1e-12:
            raise ValueError(f"sessions advance in fixed ticks of {self._tick} s")
        if self.playback != "playing":
            self._emit("warning", {"message": "step ignored: session is paused"})
            return
        self._advance_one_tick(emit=True)
        if self.tick_count >= self._duration_ticks:
            self.playback = "paused"

    def play(self) -> None:
        self.playback = "playing"

    def pause(self) -> None:
        self.playback = "paused"

    def seek(self, time: float) -> None:
        """Jump to a simulated time by silently re-simulating from the start.

        The supervisor decision resets to pending (the replay shows planner
        behavior); the frozen decision point survives.  Playback pauses.
        """
        if not math.isfinite(time) or time < 0:
            raise ValueError(f"seek time must be finite and >= 0, got {time!r}")
        target = min(int(math.floor(time / self._tick + 1e-9)), self._duration_ticks)
        self.decision = "pending"
        self._reset_engine()
        while self.tick_count < target:
            self._advance_one_tick(emit=False)
        self.playback = "paused"
        self._emit_tick()

    def record_decision(self, verdict: str) -> None:
        if verdict not in ("accepted", "declined"):
            raise ValueError(f"verdict must be accepted or declined, got {verdict!r}")
        if self.decision != "pending":
            raise DecisionConflictError(
                f"decision already {self.decision} for session {self.session_id}")
        self.decision = verdict
        self._emit("decision", {"verdict": verdict})

    def set_foil_characteristic(self, characteristic: Characteristic | str) -> None:
        """Re-pick the alternative foil against the frozen decision plan."""
        if isinstance(characteristic, str):
            characteristic = Characteristic(characteristic)
        if self.decision_point is None:
            raise MissingDecisionPointError(
                f"session {self.session_id} has no decision point")
        self.characteristic = characteristic
        self.decision_point = reselect_foil(self.decision_point, characteristic)
        self._emit_explanation()

    # ------------------------------------------------------------ outputs

    def snapshot(self) -> dict[str, Any]:
        sc = self.scenario
        return {
            "session_id": self.session_id,
            "scenario": {
                "id": sc.id,
                "title": sc.title,
                "description": sc.description,
                "foil_characteristic": sc.foil_characteristic.value,
                "cruise_speed": sc.cruise_speed,
                "route": [{"north": wp.north, "east": wp.east,
                           "acceptance_radius": wp.acceptance_radius}
                          for wp in sc.route],
            },
            "clock": self.clock,
            "playback": self.playback,
            "decision": self.decision,
            "characteristic": self.characteristic.value,
            "seq": self._seq - 1,
            "ownship": vessel_wire(self.ownship),
            "obstacles": [self._obstacle_wire(tr) for tr in self.obstacles],
            "decision_point": (decision_point_wire(self.decision_point)
                               if self.decision_point else None),
            "plan": self._plan_payload(self.current_plan),
        }

    def _obstacle_wire(self, tr: ObstacleTrack) -> dict[str, Any]:
        own = self.ownship
        s = tr.state
        closest = cpa(own, s, self.cfg.encounter.risk_horizon)
        horizon = self.cfg.encounter.risk_horizon
        return {
            "id": tr.id,
            "north": s.north,
            "east": s.east,
            "course_deg": math.degrees(s.course),
            "speed": s.speed,
            "length": tr.length,
            "width": tr.width,
            "bearing_deg": math.degrees(relative_bearing(own, s)),
            "range": math.hypot(s.north - own.north, s.east - own.east),
            "cpa_distance": closest.distance,
            "cpa_time": closest.time,
            "encounter": classify_encounter(own, s, self.cfg.encounter).value,
            "predicted": [[p.north, p.east] for p in
                          predict_obstacle(tr, horizon, PREDICTION_SPACING)],
        }

    def _plan_payload(self, result: PlanResult) -> dict[str, Any]:
        return {
            "solution": result.solution,
            "offset": offset_wire(result.solution_offset),
            "candidates": [{**offset_wire(c.offset), "total": b.total}
                           for c, b in zip(result.candidates, result.breakdowns)],
            "breakdown": breakdown_wire(result.solution_breakdown),
        }

    def _emit(self, kind: str, payload: dict[str, Any]) -> None:
        record = {"seq": self._seq, "kind": kind, "time": self.clock, **payload}
        self._seq += 1
        self.trace.append(record)

    def _emit_tick(self) -> None:
        self._emit("tick", {
            "ownship": vessel_wire(self.ownship),
            "obstacles": [self._obstacle_wire(tr) for tr in self.obstacles],
        })

    def _emit_plan(self, result: PlanResult) -> None:
        self._emit("plan", self._plan_payload(result))

    def _emit_explanation(self) -> None:
        self._emit("explanation",
                   {"decision_point": decision_point_wire(self.decision_point)})


def create_session(store: ScenarioStore, scenario_id: str, cfg: Config = Config(),
                   session_id: str | None = None) -> Session:
    scenario = store.get(scenario_id)
    sid = session_id or uuid.uuid4().hex[:12]
    return Session(sid, scenario, cfg)


def run_headless(scenario: Scenario, cfg: Config = Config(),
                 verdict: str | None = None) -> Session:
    """Run a scenario start to end without a supervisor in the loop.

    When a verdict is given it is recorded the moment the clock reaches the
    decision point's trigger time (immediately when nothing triggered).
    """
    session = Session("headless", scenario, cfg)
    session.play()
    trigger = (session.decision_point.trigger_time
               if session.decision_point is not None else 0.0)
    while session.tick_count < session._duration_ticks:
        if (verdict is not None and session.decision == "pending"
                and session.clock >= trigger - 1e-9):
            session.record_decision(verdict)
        session.step()
    return session
