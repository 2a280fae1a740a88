"""Shipping gates for the package, one test per gate.

Every check here re-derives its expectation with an oracle written locally
in this file (closed forms, brute-force scans, dense sampling) rather than
through the package's own helpers, and prints a single PASS/FAIL line.
"""
from __future__ import annotations

import math
import random
import subprocess
import sys
from pathlib import Path
from time import perf_counter

import numpy as np
import pytest

from bridgewatch import (
    Characteristic,
    GuidanceCommand,
    NOMINAL_OFFSET,
    VesselState,
    WorldView,
    ahead_of_time_probe,
    audit_trace,
    build_explanation,
    contrastive_set,
    cpa,
    create_session,
    los_guidance,
    plan,
    propagate,
    run_headless,
    select_contrastive_cost,
    select_foil,
)
from bridgewatch.explain import ALTERNATIVE_LABEL, NO_ALTERNATIVE_TEXT
from bridgewatch.planner import CostBreakdown, CostMeasures
from bridgewatch.trace import records_to_jsonl

# The canonical component order, restated here as the oracle's ground truth.
ORDER = ("collision_risk", "colreg", "transition", "speed_deviation",
         "course_deviation", "speed_change", "course_change")

# Characteristic constraints, restated independently of the package.
CONSTRAINTS = {
    Characteristic.REDUCED_SPEED: lambda c, f: c.multiplier < f.multiplier,
    Characteristic.PORT_TURN: lambda c, f: c.course < 0.0,
    Characteristic.STARBOARD_TURN: lambda c, f: c.course > 0.0,
    Characteristic.CLOSER_TO_ROUTE: lambda c, f: abs(c.course) < abs(f.course),
    Characteristic.FARTHER_FROM_ROUTE: lambda c, f: abs(c.course) > abs(f.course),
}


def _report(gate: str, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'} {gate}: {detail}")
    assert ok, f"{gate}: {detail}"


def _selection_key(total, offset):
    """The documented candidate ordering, restated for re-scans."""
    return (total, abs(offset.course), 0 if offset.course > 0 else 1,
            -offset.multiplier)


@pytest.fixture(scope="module")
def trigger_plans(store, cfg):
    """The first deviating plan of every bundled scenario, via the probe."""
    points = {}
    for sid in store.ids():
        sc = store.get(sid)
        world = WorldView(sc.route, sc.cruise_speed, sc.obstacles)
        points[sid] = ahead_of_time_probe(world, sc.ownship, NOMINAL_OFFSET,
                                          sc.foil_characteristic, cfg)
    return points


def test_criterion_1_head_on_keeps_starboard_rule(cfg, store):
    start = perf_counter()
    session = create_session(store, "head_on_single", cfg, "acc-1")
    elapsed = perf_counter() - start
    point = session.decision_point
    assert point is not None, "no decision point was produced"
    offset = point.plan.solution_offset
    colreg_cost = point.plan.solution_breakdown.colreg
    alternative = point.explanations[1]
    ok = (offset.course > 0.0
          and colreg_cost == 0.0
          and point.foil.characteristic is Characteristic.PORT_TURN
          and alternative.selected_cost in ("colreg", "collision_risk")
          and elapsed < 5.0)
    _report("head-on-rule", ok,
            f"solution {math.degrees(offset.course):+.0f}° x{offset.multiplier}, "
            f"rule cost {colreg_cost}, port-foil explanation keyed on "
            f"{alternative.selected_cost}, {elapsed:.2f} s")


def test_criterion_2_accepted_runs_keep_safe_distance(accepted_runs, cfg):
    walls = {sid: wall for sid, (_, wall) in accepted_runs.items()}
    seps = {sid: sess.min_separation for sid, (sess, _) in accepted_runs.items()}
    total = sum(walls.values())
    ok = (all(d >= cfg.planner.safe_distance for d in seps.values())
          and total < 20.0)
    listing = ", ".join(f"{sid} {d:.1f} m" for sid, d in sorted(seps.items()))
    _report("safe-distance", ok, f"{listing}; {total:.1f} s for four runs")


def test_criterion_3_plan_records_are_exact_argmins(accepted_runs):
    checked = 0
    bad = []
    for sid, (session, _) in accepted_runs.items():
        for rec in session.trace:
            if rec["kind"] != "plan":
                continue
            checked += 1
            best, best_key = None, None
            for i, cand in enumerate(rec["candidates"]):
                key = (cand["total"], abs(cand["course_offset_deg"]),
                       0 if cand["course_offset_deg"] > 0 else 1,
                       -cand["speed_multiplier"])
                if best_key is None or key < best_key:
                    best, best_key = i, key
            if best != rec["solution"]:
                bad.append(f"{sid}@{rec['time']}: stored {rec['solution']} != {best}")
    _report("plan-argmin", not bad and checked > 100,
            f"{checked} plan records re-scanned" + (f"; first issue {bad[0]}" if bad else ""))


def test_criterion_4_contrastive_selection_matches_brute_force():
    rng = random.Random(48151623)
    values = (0.0, 0.5, 1.0, 2.0, 4.0, 50.0)

    def random_breakdown():
        parts = {name: (rng.choice(values) if rng.random() < 0.7
                        else round(rng.uniform(0.0, 8.0), 3))
                 for name in ORDER}
        return CostBreakdown.build(measures=CostMeasures(), **parts)

    mismatches = 0
    for _ in range(1000):
        fact, foil = random_breakdown(), random_breakdown()
        expected_set = tuple(n for n in ORDER
                             if getattr(fact, n) < getattr(foil, n))
        expected_sel, best_diff = None, math.inf
        for n in expected_set:
            diff = getattr(fact, n) - getattr(foil, n)
            if diff < best_diff:
                expected_sel, best_diff = n, diff
        got_set = contrastive_set(fact, foil)
        got_sel = select_contrastive_cost(got_set, fact, foil)
        if got_set != expected_set or got_sel != expected_sel:
            mismatches += 1
    _report("contrastive-oracle", mismatches == 0,
            f"1000 randomized breakdown pairs, {mismatches} mismatches")


def test_criterion_5_foils_are_constraint_minimal(trigger_plans):
    checks = 0
    sentinels = 0
    bad = []
    for sid, point in trigger_plans.items():
        result = point.plan
        fact_offset = result.solution_offset
        for characteristic, constraint in CONSTRAINTS.items():
            checks += 1
            picked = select_foil(result, characteristic)
            eligible = [k for k, cand in enumerate(result.candidates)
                        if k != result.solution
                        and constraint(cand.offset, fact_offset)]
            if not eligible:
                sentinels += 1
                text = build_explanation(result, picked.alternative_index,
                                         ALTERNATIVE_LABEL).text
                if picked.alternative_index is not None or text != NO_ALTERNATIVE_TEXT:
                    bad.append(f"{sid}/{characteristic.value}: expected the "
                               f"none sentinel")
                continue
            best = min(eligible, key=lambda k: _selection_key(
                result.breakdowns[k].total, result.candidates[k].offset))
            if picked.alternative_index != best:
                bad.append(f"{sid}/{characteristic.value}: "
                           f"{picked.alternative_index} != {best}")
            elif not constraint(result.candidates[best].offset, fact_offset):
                bad.append(f"{sid}/{characteristic.value}: constraint violated")
    _report("foil-selection", not bad and checks == 20,
            f"{checks} scenario-characteristic pairs, {sentinels} none-sentinels"
            + (f"; first issue {bad[0]}" if bad else ""))


def test_criterion_6_probe_triggers_at_the_first_deviation(store, cfg, trigger_plans):
    step = cfg.probe.step
    bad = []
    for sid in store.ids():
        sc = store.get(sid)
        point = trigger_plans[sid]
        # Independent scan: advance under plain guidance, replan every 5 s.
        own, idx = sc.ownship, 0
        obstacles = sc.obstacles
        prev = NOMINAL_OFFSET
        found = None
        previous_was_nominal = None
        for k in range(int(cfg.probe.time_limit / step) + 1):
            world = WorldView(sc.route, sc.cruise_speed, obstacles, idx)
            result = plan(world, own, prev, cfg)
            deviates = not (result.solution_offset.course == 0.0
                            and result.solution_offset.multiplier == 1.0)
            if deviates:
                found = sc.ownship.time + k * step
                break
            previous_was_nominal = True
            prev = result.solution_offset
            for _ in range(int(round(step / cfg.planner.dt))):
                cmd, idx = los_guidance(own, sc.route, idx, cfg.guidance,
                                        sc.cruise_speed)
                own = propagate(own, cmd, cfg.planner.dt, cfg.vessel)
            obstacles = tuple(
                type(tr)(tr.id, VesselState(
                    tr.state.time + step,
                    tr.state.north + tr.state.velocity()[0] * step,
                    tr.state.east + tr.state.velocity()[1] * step,
                    tr.state.course, tr.state.speed), tr.length, tr.width)
                for tr in obstacles)
        if point is None or found != point.trigger_time:
            bad.append(f"{sid}: probe says "
                       f"{point.trigger_time if point else None}, scan says {found}")
        elif found > 0 and previous_was_nominal is not True:
            bad.append(f"{sid}: no nominal plan immediately before the trigger")
    triggers = {sid: p.trigger_time for sid, p in trigger_plans.items() if p}
    _report("trigger-minimality", not bad,
            "triggers " + ", ".join(f"{sid}={t:g}s" for sid, t in sorted(triggers.items()))
            + (f"; first issue {bad[0]}" if bad else ""))


def test_criterion_7_kinematics_against_closed_forms(cfg):
    start = perf_counter()
    rng = random.Random(9021)
    vessel = cfg.vessel

    # Straight-line propagation: exact heading hold, one-step error < 1e-9 m.
    worst_line = 0.0
    for _ in range(100):
        course = rng.uniform(-math.pi, math.pi)
        speed = rng.uniform(0.0, vessel.max_speed)
        state = VesselState(0.0, rng.uniform(-50, 50), rng.uniform(-50, 50),
                            course, speed)
        out = propagate(state, GuidanceCommand(course, speed), 1.0, vessel)
        worst_line = max(worst_line,
                         abs(out.north - (state.north + speed * math.cos(course))),
                         abs(out.east - (state.east + speed * math.sin(course))))

    # Course lag: after one time constant, (1 - 1/e) of a 90 degree demand.
    state = VesselState(0.0, 0.0, 0.0, 0.0, 5.0)
    cmd = GuidanceCommand(math.pi / 2, 5.0)
    for _ in range(3):
        state = propagate(state, cmd, 1.0, vessel)
    lag_error_deg = abs(math.degrees(
        state.course - (math.pi / 2) * (1.0 - math.exp(-1.0))))

    # CPA against dense dt=0.01 sampling, 500 random constant-velocity pairs.
    ts = np.arange(0.0, 120.0 + 1e-9, 0.01)
    worst_cpa = 0.0
    for _ in range(500):
        own = VesselState(0.0, 0.0, 0.0, rng.uniform(-math.pi, math.pi),
                          rng.uniform(0.0, 17.0))
        other = VesselState(0.0, rng.uniform(-2000, 2000), rng.uniform(-2000, 2000),
                            rng.uniform(-math.pi, math.pi), rng.uniform(0.0, 17.0))
        ovn, ove = own.velocity()
        tvn, tve = other.velocity()
        sampled = float(np.hypot(other.north + (tvn - ovn) * ts,
                                 other.east + (tve - ove) * ts).min())
        worst_cpa = max(worst_cpa, abs(cpa(own, other, 120.0).distance - sampled))
    elapsed = perf_counter() - start

    ok = worst_line < 1e-9 and lag_error_deg < 1.0 and worst_cpa <= 0.5 and elapsed < 10.0
    _report("kinematics", ok,
            f"line error {worst_line:.2e} m, lag error {lag_error_deg:.2f}°, "
            f"cpa error {worst_cpa:.3f} m over 500 pairs, {elapsed:.1f} s")


def test_criterion_8_reruns_are_byte_identical_and_audit_clean(accepted_runs, store, cfg):
    first = accepted_runs["head_on_single"][0]
    second = run_headless(store.get("head_on_single"), cfg, "accepted")
    identical = (records_to_jsonl(first.trace).encode()
                 == records_to_jsonl(second.trace).encode())
    dirty = []
    for sid, (session, _) in list(accepted_runs.items()) + [("rerun", (second, 0.0))]:
        report = audit_trace(session.trace)
        if not report.ok:
            dirty.append(f"{sid}: {report.issues[0]}")
    ok = identical and not dirty
    size = len(records_to_jsonl(first.trace).encode())
    _report("determinism", ok,
            f"two runs, {size} bytes each, byte-identical={identical}, "
            f"{len(accepted_runs) + 1} traces audited"
            + (f"; first issue {dirty[0]}" if dirty else ""))


def test_criterion_9_full_suite_runtime():
    root = Path(__file__).resolve().parents[1]
    start = perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "tests", "-q", "-p", "no:cacheprovider",
         "--deselect",
         "tests/test_acceptance.py::test_criterion_9_full_suite_runtime"],
        cwd=root, capture_output=True, text=True, timeout=300)
    elapsed = perf_counter() - start
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else "no output"
    ok = proc.returncode == 0 and elapsed < 60.0
    _report("suite-runtime", ok, f"{elapsed:.1f} s, nested run said {tail!r}")
