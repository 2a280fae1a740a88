"""Simulation-based receding-horizon planner over course/speed offsets.

Each replan forward-simulates every candidate (course offset, speed
multiplier) pair through the vessel model along the route, scores the
resulting trajectories against constant-velocity obstacle predictions with
an additive seven-component cost, and picks the cheapest candidate.  Ties
break toward the smallest course offset, then starboard, then the larger
speed multiplier.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .config import Config, GuidanceConfig, PlannerConfig, VesselConfig, course_offsets
from .scenario import EncounterType, ObstacleTrack, classify_encounter, predict_obstacle
from .vessel import GuidanceCommand, VesselState, Waypoint, los_guidance, propagate, wrap_angle

# canonical component order; doubles as the explanation tie-break priority
COST_COMPONENTS = (
    "collision_risk",
    "colreg",
    "transition",
    "speed_deviation",
    "course_deviation",
    "speed_change",
    "course_change",
)


@dataclass(frozen=True)
class ControlOffset:
    """Modification applied on top of the guidance references."""
    course: float       # rad, added to course_ref, positive starboard
    multiplier: float   # scales speed_ref, in [0, 1]


NOMINAL_OFFSET = ControlOffset(0.0, 1.0)


@dataclass(frozen=True)
class CostMeasures:
    """Semantic quantities captured while the cost was computed.

    These feed explanation text later; they are never recomputed after the
    fact.  Fields are None/neutral when the source situation did not arise.
    """
    cpa_distance: float | None = None       # m, closest sampled approach
    cpa_obstacle_id: str | None = None      # obstacle behind cpa_distance
    colreg_rule: int | None = None          # violated rule number, if any
    transition_behavior: str = "none"       # "none" | "side_switch"
    speed_offset: float = 0.0               # m/s below the speed reference
    course_offset_deg: float = 0.0          # deg, the candidate's own offset


@dataclass(frozen=True)
class CostBreakdown:
    collision_risk: float
    colreg: float
    transition: float
    speed_deviation: float
    course_deviation: float
    speed_change: float
    course_change: float
    total: float
    measures: CostMeasures

    def component(self, name: str) -> float:
        if name not in COST_COMPONENTS:
            raise KeyError(f"unknown cost component {name!r}")
        return getattr(self, name)

    @classmethod
    def build(cls, collision_risk: float, colreg: float, transition: float,
              speed_deviation: float, course_deviation: float,
              speed_change: float, course_change: float,
              measures: CostMeasures) -> "CostBreakdown":
        total = (collision_risk + colreg + transition + speed_deviation
                 + course_deviation + speed_change + course_change)
        return cls(collision_risk, colreg, transition, speed_deviation,
                   course_deviation, speed_change, course_change, total, measures)


@dataclass(frozen=True)
class CandidateRollout:
    """Forward-simulated ownship trajectory for one candidate."""
    offset: ControlOffset
    states: tuple[VesselState, ...]  # sampled at 0, dt, ..., horizon
    horizon: float
    return_time: float


@dataclass(frozen=True)
class WorldView:
    """Everything the planner needs to know about the world right now."""
    route: tuple[Waypoint, ...]
    cruise_speed: float
    obstacles: tuple[ObstacleTrack, ...]
    active_index: int = 0


@dataclass(frozen=True)
class ObstaclePrediction:
    """Constant-velocity obstacle samples as arrays, one per rollout sample."""
    track: ObstacleTrack
    north: np.ndarray
    east: np.ndarray
    vn: float
    ve: float


@dataclass(frozen=True)
class CostContext:
    """Per-replan constants shared by every candidate evaluation."""
    references: GuidanceCommand
    encounters: Mapping[str, EncounterType]
    dt: float
    planner: PlannerConfig
    close_range: float = 500.0  # m, rule-cost proximity gate


@dataclass(frozen=True)
class PlanResult:
    solution: int
    candidates: tuple[CandidateRollout, ...]
    breakdowns: tuple[CostBreakdown, ...]
    references: GuidanceCommand
    previous_offset: ControlOffset

    @property
    def solution_offset(self) -> ControlOffset:
        return self.candidates[self.solution].offset

    @property
    def solution_breakdown(self) -> CostBreakdown:
        return self.breakdowns[self.solution]

    @property
    def nominal_index(self) -> int:
        for k, cand in enumerate(self.candidates):
            if cand.offset.course == 0.0 and cand.offset.multiplier == 1.0:
                return k
        raise RuntimeError("candidate grid is missing the nominal offset")


def generate_candidates(planner: PlannerConfig = PlannerConfig()) -> tuple[ControlOffset, ...]:
    """Candidate grid: multipliers in listed (descending) order, course
    offsets ascending port to starboard within each multiplier block."""
    offsets = course_offsets(planner)
    return tuple(ControlOffset(chi, m)
                 for m in planner.speed_multipliers
                 for chi in offsets)


def candidate_sort_key(total: float, offset: ControlOffset) -> tuple:
    """Ordering used everywhere a cheapest candidate is picked.

    Cheaper total first; ties prefer the smaller |course offset|, then
    starboard over port, then the larger speed multiplier.
    """
    starboard_rank = 0 if offset.course > 0 else 1
    return (total, abs(offset.course), starboard_rank, -offset.multiplier)


def rollout_candidate(own: VesselState, offset: ControlOffset,
                      route: tuple[Waypoint, ...], cruise_speed: float,
                      horizon: float, return_time: float, dt: float,
                      active_index: int = 0,
                      guidance: GuidanceConfig = GuidanceConfig(),
                      vessel: VesselConfig = VesselConfig()) -> CandidateRollout:
    """Simulate ownship under LOS guidance with the offset applied.

    The offset modifies the references until ``return_time``, after which
    plain guidance steers back to the route.  References refresh every
    ``dt`` along the rollout.
    """
    if not 0 < return_time <= horizon:
        raise ValueError("need 0 < return_time <= horizon")
    if not dt > 0:
        raise ValueError("dt must be positive")
    steps = int(math.floor(horizon / dt + 1e-9))
    chi, mult = offset.course, offset.multiplier
    states = [own]
    state = own
    idx = active_index
    for k in range(steps):
        cmd, idx = los_guidance(state, route, idx, guidance, cruise_speed)
        if k * dt < return_time:
            cmd = GuidanceCommand(wrap_angle(cmd.course_ref + chi),
                                  mult * cmd.speed_ref)
        state = propagate(state, cmd, dt, vessel)
        states.append(state)
    return CandidateRollout(offset, tuple(states), horizon, return_time)


def predict_arrays(track: ObstacleTrack, horizon: float, dt: float) -> ObstaclePrediction:
    states = predict_obstacle(track, horizon, dt)
    vn, ve = track.state.velocity()
    return ObstaclePrediction(
        track,
        np.fromiter((s.north for s in states), float, count=len(states)),
        np.fromiter((s.east for s in states), float, count=len(states)),
        vn, ve)


def evaluate_costs(context: CostContext, rollout: CandidateRollout,
                   predictions: Mapping[str, ObstaclePrediction],
                   previous_offset: ControlOffset) -> CostBreakdown:
    """Score one candidate rollout against the obstacle predictions."""
    p = context.planner
    states = rollout.states
    m = len(states)
    own_n = np.fromiter((s.north for s in states), float, count=m)
    own_e = np.fromiter((s.east for s in states), float, count=m)
    course = np.fromiter((s.course for s in states), float, count=m)
    speed = np.fromiter((s.speed for s in states), float, count=m)
    own_vn = speed * np.cos(course)
    own_ve = speed * np.sin(course)
    times = np.arange(m, dtype=float) * context.dt

    chi, mult = rollout.offset.course, rollout.offset.multiplier

    # --- collision risk: worst weighted proximity over obstacles and samples
    collision = 0.0
    risk_id: str | None = None
    risk_distance: float | None = None
    nearest_id: str | None = None
    nearest_distance = math.inf
    colreg = 0.0
    rule: int | None = None
    for track_id, pred in predictions.items():
        if len(pred.north) != m:
            raise ValueError(f"prediction grid for {track_id!r} has "
                             f"{len(pred.north)} samples, rollout has {m}")
        dn = pred.north - own_n
        de = pred.east - own_e
        dist = np.hypot(dn, de)
        min_d = float(dist.min())
        within = dist <= p.safe_distance
        if within.any():
            vrel2 = (pred.vn - own_vn) ** 2 + (pred.ve - own_ve) ** 2
            ratio = p.safe_distance / np.maximum(dist, p.min_range)
            decay = 1.0 + times / p.risk_decay_time
            vals = p.collision_weight * vrel2 * ratio ** p.proximity_exponent / decay
            f_i = float(np.where(within, vals, 0.0).max())
        else:
            f_i = 0.0
        if f_i > collision:
            collision = f_i
            risk_id, risk_distance = track_id, min_d
        if min_d < nearest_distance:
            nearest_distance, nearest_id = min_d, track_id

        # --- rule compliance, only for obstacles that actually come close
        if rule is None and min_d <= context.close_range:
            enc = context.encounters.get(track_id, EncounterType.SAFE)
            if enc is EncounterType.HEAD_ON and chi < 0.0:
                rule = 14
            elif enc is EncounterType.CROSSING_GIVE_WAY and _crosses_ahead(
                    own_n, own_e, times, pred.track, p.crossing_margin):
                rule = 15
    if rule is not None:
        colreg = p.colreg_weight

    if risk_id is None and nearest_id is not None:
        risk_id, risk_distance = nearest_id, nearest_distance

    # --- maneuver-quality terms
    side_switch = chi * previous_offset.course < 0.0
    transition = p.transition_weight if side_switch else 0.0
    speed_deviation = p.speed_dev_weight * (1.0 - mult)
    course_deviation = p.course_dev_weight * chi * chi
    speed_change = p.speed_change_weight * abs(mult - previous_offset.multiplier)
    dchi = chi - previous_offset.course
    course_change = p.course_change_weight * dchi * dchi

    measures = CostMeasures(
        cpa_distance=risk_distance,
        cpa_obstacle_id=risk_id,
        colreg_rule=rule,
        transition_behavior="side_switch" if side_switch else "none",
        speed_offset=(1.0 - mult) * context.references.speed_ref,
        course_offset_deg=math.degrees(chi),
    )
    return CostBreakdown.build(collision, colreg, transition, speed_deviation,
                               course_deviation, speed_change, course_change,
                               measures)


def _crosses_ahead(own_n: np.ndarray, own_e: np.ndarray, times: np.ndarray,
                   track: ObstacleTrack, margin: float) -> bool:
    """Does this trajectory cross the obstacle's track line ahead of it?

    Detects sign changes of the lateral offset w.r.t. the obstacle's line,
    interpolates the crossing point, and compares the obstacle's arrival
    time there with ours.  "Ahead" means we arrive first with less than
    ``margin`` seconds to spare.
    """
    s0 = track.state
    if s0.speed <= 1e-9:
        return False
    wn, we = math.cos(s0.course), math.sin(s0.course)
    rn = own_n - s0.north
    re = own_e - s0.east
    lateral = wn * re - we * rn
    sign_change = lateral[:-1] * lateral[1:] < 0.0
    for k in np.nonzero(sign_change)[0]:
        frac = lateral[k] / (lateral[k] - lateral[k + 1])
        t_cross = times[k] + frac * (times[k + 1] - times[k])
        xn = rn[k] + frac * (rn[k + 1] - rn[k])
        xe = re[k] + frac * (re[k + 1] - re[k])
        along = xn * wn + xe * we
        t_obstacle = along / s0.speed
        if 0.0 <= t_obstacle - t_cross < margin:
            return True
    return False


def plan(world: WorldView, own: VesselState, previous_offset: ControlOffset,
         cfg: Config = Config()) -> PlanResult:
    """One receding-horizon replan: evaluate all candidates, pick the best."""
    p = cfg.planner
    references, _ = los_guidance(own, world.route, world.active_index,
                                 cfg.guidance, world.cruise_speed)
    predictions = {tr.id: predict_arrays(tr, p.horizon, p.dt)
                   for tr in world.obstacles}
    encounters = {tr.id: classify_encounter(own, tr.state, cfg.encounter)
                  for tr in world.obstacles}
    context = CostContext(references, encounters, p.dt, p,
                          close_range=cfg.encounter.close_range)
    rollouts: list[CandidateRollout] = []
    breakdowns: list[CostBreakdown] = []
    best = -1
    best_key: tuple | None = None
    for k, offset in enumerate(generate_candidates(p)):
        rollout = rollout_candidate(own, offset, world.route, world.cruise_speed,
                                    p.horizon, p.return_time, p.dt,
                                    active_index=world.active_index,
                                    guidance=cfg.guidance, vessel=cfg.vessel)
        breakdown = evaluate_costs(context, rollout, predictions, previous_offset)
        key = candidate_sort_key(breakdown.total, offset)
        if best_key is None or key < best_key:
            best, best_key = k, key
        rollouts.append(rollout)
        breakdowns.append(breakdown)
    return PlanResult(best, tuple(rollouts), tuple(breakdowns), references,
                      previous_offset)
