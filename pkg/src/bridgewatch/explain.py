"""Contrastive answers to "why this maneuver and not that one".

Given a plan, the engine pairs the chosen candidate (the fact) with a foil:
either the nominal keep-course candidate or the cheapest alternative whose
offset matches a requested characteristic (slower, port, starboard, closer
to or farther from the route).  The contrastive set collects every cost
component where the fact strictly beats the foil; the component with the
largest margin — ties resolved by a fixed priority — drives a one-sentence
explanation built from the measures recorded during cost evaluation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .config import Config
from .errors import MissingMeasureError
from .planner import (COST_COMPONENTS, ControlOffset, CostBreakdown, CostMeasures,
                      PlanResult, WorldView, candidate_sort_key, plan)
from .scenario import Characteristic, advance_track
from .vessel import VesselState, los_guidance, propagate

NOMINAL_LABEL = "original route"
ALTERNATIVE_LABEL = "alternative"

NO_ALTERNATIVE_TEXT = "No alternative available for the requested characteristic."


@dataclass(frozen=True)
class FoilSelection:
    fact_index: int
    nominal_index: int
    alternative_index: int | None   # None when no candidate fits
    characteristic: Characteristic


@dataclass(frozen=True)
class ContrastiveExplanation:
    fact_index: int
    foil_index: int | None
    foil_label: str
    contrastive_set: tuple[str, ...]
    selected_cost: str | None
    fact_measure: object
    foil_measure: object
    text: str


@dataclass(frozen=True)
class DecisionPoint:
    """A frozen plan plus its explanations, surfaced to the supervisor."""
    trigger_time: float
    plan: PlanResult
    explanations: tuple[ContrastiveExplanation, ContrastiveExplanation]
    foil: FoilSelection


def event_trigger(result: PlanResult) -> bool:
    """True when the planner wants anything but the nominal offset."""
    offset = result.solution_offset
    return not (offset.course == 0.0 and offset.multiplier == 1.0)


def _satisfies(characteristic: Characteristic, candidate: ControlOffset,
               fact: ControlOffset) -> bool:
    if characteristic is Characteristic.REDUCED_SPEED:
        return candidate.multiplier < fact.multiplier
    if characteristic is Characteristic.PORT_TURN:
        return candidate.course < 0.0
    if characteristic is Characteristic.STARBOARD_TURN:
        return candidate.course > 0.0
    if characteristic is Characteristic.CLOSER_TO_ROUTE:
        return abs(candidate.course) < abs(fact.course)
    if characteristic is Characteristic.FARTHER_FROM_ROUTE:
        return abs(candidate.course) > abs(fact.course)
    raise ValueError(f"unknown characteristic {characteristic!r}")


def select_foil(result: PlanResult, characteristic: Characteristic) -> FoilSelection:
    """Pick the cheapest non-fact candidate matching the characteristic.

    Ties break exactly like the planner's own selection.  With no matching
    candidate the alternative index is None.
    """
    fact = result.solution
    fact_offset = result.solution_offset
    best: int | None = None
    best_key: tuple | None = None
    for k, cand in enumerate(result.candidates):
        if k == fact:
            continue
        if not _satisfies(characteristic, cand.offset, fact_offset):
            continue
        key = candidate_sort_key(result.breakdowns[k].total, cand.offset)
        if best_key is None or key < best_key:
            best, best_key = k, key
    return FoilSelection(fact, result.nominal_index, best, characteristic)


def contrastive_set(fact: CostBreakdown, foil: CostBreakdown) -> tuple[str, ...]:
    """Components where the fact is strictly cheaper, in canonical order."""
    return tuple(name for name in COST_COMPONENTS
                 if fact.component(name) < foil.component(name))


def select_contrastive_cost(names: tuple[str, ...], fact: CostBreakdown,
                            foil: CostBreakdown) -> str | None:
    """The component with the most negative fact-minus-foil difference.

    Ties resolve by canonical component order.  Empty input yields None.
    """
    best: str | None = None
    best_diff = math.inf
    for name in names:
        if name not in COST_COMPONENTS:
            raise KeyError(f"unknown cost component {name!r}")
        diff = fact.component(name) - foil.component(name)
        if diff < best_diff:
            best, best_diff = name, diff
    return best


def _measure_value(component: str, measures: CostMeasures):
    if component == "collision_risk":
        return measures.cpa_distance
    if component == "colreg":
        return measures.colreg_rule
    if component == "transition":
        return measures.transition_behavior
    if component == "speed_deviation":
        return measures.speed_offset
    if component == "course_deviation":
        return measures.course_offset_deg
    return None  # speed_change / course_change carry no semantic measure


def render_explanation(selected: str | None, fact: CostMeasures,
                       foil: CostMeasures, foil_label: str) -> str:
    """One deterministic sentence per selected component.

    Distances round to whole metres and angles to whole degrees; the
    no-advantage case (selected None) states that the foil is no worse.
    """
    if selected is None:
        return (f"The {foil_label} scores no worse than the proposed "
                f"maneuver on any objective.")
    if selected == "collision_risk":
        if fact.cpa_distance is None or foil.cpa_distance is None:
            raise MissingMeasureError("collision_risk selected without CPA measures")
        vessel = fact.cpa_obstacle_id or foil.cpa_obstacle_id or "traffic"
        return (f"Proposed maneuver keeps a closest approach of "
                f"{round(fact.cpa_distance)} m to {vessel}; the {foil_label} "
                f"gives {round(foil.cpa_distance)} m.")
    if selected == "colreg":
        rule = foil.colreg_rule if foil.colreg_rule is not None else fact.colreg_rule
        if rule is None:
            raise MissingMeasureError("colreg selected without a rule measure")
        return (f"Proposed maneuver complies with COLREG Rule {rule}; "
                f"the {foil_label} would violate it.")
    if selected == "transition":
        return (f"Proposed maneuver avoids switching maneuver side; "
                f"the {foil_label} would reverse the turn direction.")
    if selected == "speed_deviation":
        return (f"Proposed maneuver keeps speed closer to plan "
                f"({fact.speed_offset:.1f} vs {foil.speed_offset:.1f} m/s "
                f"below reference).")
    if selected == "course_deviation":
        return (f"Proposed maneuver stays closer to the planned course "
                f"({round(fact.course_offset_deg)}° vs "
                f"{round(foil.course_offset_deg)}° offset).")
    if selected == "speed_change":
        return (f"Proposed maneuver changes speed less from the previous "
                f"maneuver than the {foil_label}.")
    if selected == "course_change":
        return (f"Proposed maneuver changes course less from the previous "
                f"maneuver than the {foil_label}.")
    raise KeyError(f"unknown cost component {selected!r}")


def build_explanation(result: PlanResult, foil_index: int | None,
                      foil_label: str) -> ContrastiveExplanation:
    """Assemble the full fact-vs-foil record for one foil."""
    fact_index = result.solution
    if foil_index is None:
        return ContrastiveExplanation(fact_index, None, foil_label, (), None,
                                      None, None, NO_ALTERNATIVE_TEXT)
    fact = result.breakdowns[fact_index]
    foil = result.breakdowns[foil_index]
    names = contrastive_set(fact, foil)
    selected = select_contrastive_cost(names, fact, foil)
    fact_measure = _measure_value(selected, fact.measures) if selected else None
    foil_measure = _measure_value(selected, foil.measures) if selected else None
    text = render_explanation(selected, fact.measures, foil.measures, foil_label)
    return ContrastiveExplanation(fact_index, foil_index, foil_label, names,
                                  selected, fact_measure, foil_measure, text)


def build_decision_point(result: PlanResult, characteristic: Characteristic,
                         trigger_time: float) -> DecisionPoint:
    foil = select_foil(result, characteristic)
    explanations = (
        build_explanation(result, foil.nominal_index, NOMINAL_LABEL),
        build_explanation(result, foil.alternative_index, ALTERNATIVE_LABEL),
    )
    return DecisionPoint(trigger_time, result, explanations, foil)


def reselect_foil(point: DecisionPoint, characteristic: Characteristic) -> DecisionPoint:
    """Swap the alternative foil on a frozen decision point.

    The plan and the fact-vs-nominal explanation stay untouched.
    """
    foil = select_foil(point.plan, characteristic)
    alternative = build_explanation(point.plan, foil.alternative_index,
                                    ALTERNATIVE_LABEL)
    return replace(point, foil=foil,
                   explanations=(point.explanations[0], alternative))


def ahead_of_time_probe(world: WorldView, own: VesselState,
                        previous_offset: ControlOffset,
                        characteristic: Characteristic,
                        cfg: Config = Config(),
                        time_limit: float | None = None) -> DecisionPoint | None:
    """Scan the near future for the first replan that leaves the route.

    Replans at the probe step spacing (ownship advanced under nominal
    control, obstacles dead-reckoned) until a plan's solution differs from
    the nominal offset; that instant becomes the decision point.  Returns
    None when nothing triggers within the time limit.
    """
    limit = cfg.probe.time_limit if time_limit is None else time_limit
    step = cfg.probe.step
    if not limit > 0:
        raise ValueError("time_limit must be positive")
    checks = limit / step
    if abs(checks - round(checks)) > 1e-9:
        raise ValueError("time_limit must be a multiple of the probe step")
    state = own
    idx = world.active_index
    obstacles = world.obstacles
    prev = previous_offset
    for k in range(int(round(checks)) + 1):
        view = replace(world, obstacles=obstacles, active_index=idx)
        result = plan(view, state, prev, cfg)
        if event_trigger(result):
            return build_decision_point(result, characteristic,
                                        trigger_time=own.time + k * step)
        state, idx = _advance_nominal(state, world, idx, step, cfg)
        obstacles = tuple(advance_track(tr, step) for tr in obstacles)
        prev = result.solution_offset
    return None


def _advance_nominal(state: VesselState, world: WorldView, active_index: int,
                     duration: float, cfg: Config) -> tuple[VesselState, int]:
    """Advance ownship under plain LOS guidance, references refreshed at the
    planner step just like a live session would."""
    dt = cfg.planner.dt
    steps = int(round(duration / dt))
    idx = active_index
    for _ in range(steps):
        cmd, idx = los_guidance(state, world.route, idx, cfg.guidance,
                                world.cruise_speed)
        state = propagate(state, cmd, dt, cfg.vessel)
    return state, idx
