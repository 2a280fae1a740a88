"""Trace records: wire shapes, JSONL persistence, and the invariant audit.

A trace is an append-only list of records, each carrying a monotonically
increasing ``seq`` and a ``kind`` of tick / plan / explanation / decision /
warning.  Serialization is plain ``json.dumps`` with fixed key order and
compact separators, so identical runs produce byte-identical files.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

from .errors import TraceError
from .explain import ContrastiveExplanation, DecisionPoint, _satisfies
from .planner import (COST_COMPONENTS, CandidateRollout, ControlOffset,
                      CostBreakdown, PlanResult, candidate_sort_key)
from .scenario import Characteristic
from .vessel import GuidanceCommand, VesselState, wrap_angle

RECORD_KINDS = ("tick", "plan", "explanation", "decision", "warning")
VERDICTS = ("accepted", "declined")


# ------------------------------------------------------------- wire shapes

def vessel_wire(state: VesselState) -> dict[str, float]:
    return {
        "time": state.time,
        "north": state.north,
        "east": state.east,
        "course_deg": math.degrees(state.course),
        "speed": state.speed,
    }


def offset_wire(offset: ControlOffset) -> dict[str, float]:
    return {
        "course_offset_deg": math.degrees(offset.course),
        "speed_multiplier": offset.multiplier,
    }


def offset_from_wire(raw: Mapping[str, Any]) -> ControlOffset:
    return ControlOffset(math.radians(raw["course_offset_deg"]),
                         raw["speed_multiplier"])


def breakdown_wire(breakdown: CostBreakdown) -> dict[str, Any]:
    m = breakdown.measures
    return {
        "components": {name: breakdown.component(name) for name in COST_COMPONENTS},
        "total": breakdown.total,
        "measures": {
            "cpa_distance": m.cpa_distance,
            "cpa_obstacle_id": m.cpa_obstacle_id,
            "colreg_rule": m.colreg_rule,
            "transition_behavior": m.transition_behavior,
            "speed_offset": m.speed_offset,
            "course_offset_deg": m.course_offset_deg,
        },
    }


def explanation_wire(exp: ContrastiveExplanation) -> dict[str, Any]:
    return {
        "fact": exp.fact_index,
        "foil": exp.foil_index,
        "foil_label": exp.foil_label,
        "contrastive_set": list(exp.contrastive_set),
        "selected_cost": exp.selected_cost,
        "fact_measure": exp.fact_measure,
        "foil_measure": exp.foil_measure,
        "text": exp.text,
    }


def _action_wire(references: GuidanceCommand, offset: ControlOffset) -> dict[str, float]:
    return {
        "course_deg": math.degrees(wrap_angle(references.course_ref + offset.course)),
        "speed": offset.multiplier * references.speed_ref,
    }


def _trajectory_wire(rollout: CandidateRollout) -> list[list[float]]:
    return [[s.north, s.east] for s in rollout.states]


def decision_point_wire(point: DecisionPoint) -> dict[str, Any]:
    result: PlanResult = point.plan
    foil = point.foil
    refs = result.references

    def pick(index: int | None):
        if index is None:
            return None, None
        return result.candidates[index], result.breakdowns[index]

    fact_c, fact_b = pick(foil.fact_index)
    nom_c, nom_b = pick(foil.nominal_index)
    alt_c, alt_b = pick(foil.alternative_index)
    return {
        "trigger_time": point.trigger_time,
        "characteristic": foil.characteristic.value,
        "fact": foil.fact_index,
        "nominal": foil.nominal_index,
        "alternative": foil.alternative_index,
        "references": {"course_deg": math.degrees(refs.course_ref),
                       "speed": refs.speed_ref},
        "candidates": [
            {**offset_wire(c.offset), "total": b.total}
            for c, b in zip(result.candidates, result.breakdowns)
        ],
        "breakdowns": {
            "fact": breakdown_wire(fact_b),
            "nominal": breakdown_wire(nom_b),
            "alternative": breakdown_wire(alt_b) if alt_b is not None else None,
        },
        "actions": {
            "fact": _action_wire(refs, fact_c.offset),
            "nominal": _action_wire(refs, nom_c.offset),
            "alternative": _action_wire(refs, alt_c.offset) if alt_c else None,
        },
        "trajectories": {
            "fact": _trajectory_wire(fact_c),
            "nominal": _trajectory_wire(nom_c),
            "alternative": _trajectory_wire(alt_c) if alt_c else None,
        },
        "explanations": [explanation_wire(e) for e in point.explanations],
    }


# ------------------------------------------------------------ persistence

def records_to_jsonl(records: Iterable[Mapping[str, Any]]) -> str:
    return "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in records)


def dump_trace(records: Iterable[Mapping[str, Any]], path: str | Path) -> None:
    Path(path).write_text(records_to_jsonl(records), encoding="utf-8")


def load_trace(path: str | Path) -> list[dict[str, Any]]:
    records = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceError(f"line {lineno}: not valid JSON: {exc}") from exc
        if not isinstance(record, dict):
            raise TraceError(f"line {lineno}: record must be an object")
        records.append(record)
    return records


# ------------------------------------------------------------------ audit

@dataclass
class AuditReport:
    records: int = 0
    plans: int = 0
    explanations: int = 0
    decisions: int = 0
    issues: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def lines(self) -> list[str]:
        out = [f"records: {self.records} ({self.plans} plans, "
               f"{self.explanations} explanations, {self.decisions} decisions)"]
        if self.ok:
            out.append("audit: ok")
        else:
            out.extend(f"FAIL: {issue}" for issue in self.issues)
        return out


def audit_trace(records: list[Mapping[str, Any]]) -> AuditReport:
    """Re-check every recomputable invariant of a trace.

    Plan records: the stored solution must be the exact argmin (with the
    planner tie-break) of the stored candidate totals, and the breakdown
    total the exact sum of its components.  Explanation records: contrastive
    sets and selected costs must re-derive exactly from the stored
    breakdowns, foils must satisfy their characteristic constraint and be
    cost-minimal among satisfying candidates.  Decisions must carry valid
    verdicts, at most one per simulated pass (a rewind starts a new pass).
    """
    report = AuditReport(records=len(records))
    prev_seq: int | None = None
    prev_tick_time: float | None = None
    decisions_this_pass = 0
    for i, rec in enumerate(records):
        where = f"record {i}"
        seq = rec.get("seq")
        if not isinstance(seq, int):
            report.issues.append(f"{where}: missing integer seq")
            continue
        if prev_seq is not None and seq <= prev_seq:
            report.issues.append(f"{where}: seq {seq} not above {prev_seq}")
        prev_seq = seq
        kind = rec.get("kind")
        if kind not in RECORD_KINDS:
            report.issues.append(f"{where}: unknown kind {kind!r}")
            continue
        if kind == "tick":
            t = rec.get("time")
            if prev_tick_time is not None and isinstance(t, (int, float)) \
                    and t < prev_tick_time:
                decisions_this_pass = 0  # rewind: a new simulated pass begins
            prev_tick_time = t if isinstance(t, (int, float)) else prev_tick_time
        elif kind == "plan":
            report.plans += 1
            _audit_plan(rec, where, report)
        elif kind == "explanation":
            report.explanations += 1
            _audit_explanation(rec, where, report)
        elif kind == "decision":
            report.decisions += 1
            decisions_this_pass += 1
            if rec.get("verdict") not in VERDICTS:
                report.issues.append(f"{where}: bad verdict {rec.get('verdict')!r}")
            if decisions_this_pass > 1:
                report.issues.append(f"{where}: more than one decision in a pass")
    return report


def _audit_plan(rec: Mapping[str, Any], where: str, report: AuditReport) -> None:
    candidates = rec.get("candidates")
    if not isinstance(candidates, list) or not candidates:
        report.issues.append(f"{where}: plan without candidates")
        return
    best = _rescan_argmin(candidates)
    if best != rec.get("solution"):
        report.issues.append(f"{where}: stored solution {rec.get('solution')} "
                             f"but candidate re-scan gives {best}")
    breakdown = rec.get("breakdown")
    if not isinstance(breakdown, Mapping):
        report.issues.append(f"{where}: plan without breakdown")
        return
    issue = _check_breakdown_sum(breakdown)
    if issue:
        report.issues.append(f"{where}: {issue}")
    stored_total = candidates[rec["solution"]]["total"] \
        if isinstance(rec.get("solution"), int) and 0 <= rec["solution"] < len(candidates) else None
    if stored_total is not None and breakdown.get("total") != stored_total:
        report.issues.append(f"{where}: breakdown total differs from the "
                             f"solution candidate's total")


def _rescan_argmin(candidates: list[Mapping[str, Any]]) -> int:
    best = 0
    best_key = None
    for k, cand in enumerate(candidates):
        key = candidate_sort_key(cand["total"], offset_from_wire(cand))
        if best_key is None or key < best_key:
            best, best_key = k, key
    return best


def _check_breakdown_sum(breakdown: Mapping[str, Any]) -> str | None:
    components = breakdown.get("components")
    if not isinstance(components, Mapping):
        return "breakdown without components"
    if set(components) != set(COST_COMPONENTS):
        return "breakdown components mismatch the canonical set"
    total = 0.0
    for name in COST_COMPONENTS:
        total += components[name]
    if total != breakdown.get("total"):
        return (f"breakdown total {breakdown.get('total')} is not the exact "
                f"component sum {total}")
    return None


def _audit_explanation(rec: Mapping[str, Any], where: str, report: AuditReport) -> None:
    point = rec.get("decision_point")
    if not isinstance(point, Mapping):
        report.issues.append(f"{where}: explanation without decision_point")
        return
    candidates = point.get("candidates")
    breakdowns = point.get("breakdowns")
    if not isinstance(candidates, list) or not isinstance(breakdowns, Mapping):
        report.issues.append(f"{where}: decision_point missing candidates/breakdowns")
        return
    fact_idx = point.get("fact")
    try:
        characteristic = Characteristic(point.get("characteristic"))
    except ValueError:
        report.issues.append(f"{where}: bad characteristic "
                             f"{point.get('characteristic')!r}")
        return
    _audit_foil_choice(point, candidates, fact_idx, characteristic, where, report)

    by_index = {point.get("nominal"): breakdowns.get("nominal"),
                point.get("alternative"): breakdowns.get("alternative")}
    for j, entry in enumerate(point.get("explanations", [])):
        ewhere = f"{where} explanation[{j}]"
        if entry.get("fact") != fact_idx:
            report.issues.append(f"{ewhere}: fact index mismatch")
        foil_idx = entry.get("foil")
        if foil_idx is None:
            if entry.get("contrastive_set") or entry.get("selected_cost"):
                report.issues.append(f"{ewhere}: foil-less entry must be empty")
            continue
        fact_b, foil_b = breakdowns.get("fact"), by_index.get(foil_idx)
        if not isinstance(fact_b, Mapping) or not isinstance(foil_b, Mapping):
            report.issues.append(f"{ewhere}: breakdowns for indices missing")
            continue
        fact_c = fact_b["components"]
        foil_c = foil_b["components"]
        expected_set = [n for n in COST_COMPONENTS if fact_c[n] < foil_c[n]]
        if entry.get("contrastive_set") != expected_set:
            report.issues.append(f"{ewhere}: contrastive set "
                                 f"{entry.get('contrastive_set')} != re-derived "
                                 f"{expected_set}")
        expected_sel = None
        best_diff = math.inf
        for n in expected_set:
            diff = fact_c[n] - foil_c[n]
            if diff < best_diff:
                expected_sel, best_diff = n, diff
        if entry.get("selected_cost") != expected_sel:
            report.issues.append(f"{ewhere}: selected cost "
                                 f"{entry.get('selected_cost')} != re-derived "
                                 f"{expected_sel}")
        if fact_b["total"] > foil_b["total"]:
            report.issues.append(f"{ewhere}: fact total exceeds foil total")


def _audit_foil_choice(point: Mapping[str, Any], candidates: list,
                       fact_idx: Any, characteristic: Characteristic,
                       where: str, report: AuditReport) -> None:
    if not isinstance(fact_idx, int) or not 0 <= fact_idx < len(candidates):
        report.issues.append(f"{where}: bad fact index {fact_idx!r}")
        return
    fact_offset = offset_from_wire(candidates[fact_idx])
    best: int | None = None
    best_key = None
    for k, cand in enumerate(candidates):
        if k == fact_idx:
            continue
        offset = offset_from_wire(cand)
        if not _satisfies(characteristic, offset, fact_offset):
            continue
        key = candidate_sort_key(cand["total"], offset)
        if best_key is None or key < best_key:
            best, best_key = k, key
    alt = point.get("alternative")
    if alt != best:
        report.issues.append(f"{where}: alternative {alt} != re-derived foil {best}")
    if alt is not None:
        if not isinstance(alt, int) or not 0 <= alt < len(candidates):
            report.issues.append(f"{where}: alternative index out of range")
        elif not _satisfies(characteristic, offset_from_wire(candidates[alt]),
                            fact_offset):
            report.issues.append(f"{where}: alternative violates its "
                                 f"characteristic constraint")
