import { describe, expect, it } from "vitest";

import {
  TRAJECTORY_COLORS,
  actionRows,
  applyRecord,
  controlsState,
  explanationEntries,
  fromSnapshot,
  mergeSnapshot,
  targetRows,
  trajectoryLayers,
  withConnection,
  withNotice,
} from "../src/viewmodel";
import { PlanRecord, TickRecord, WarningRecord } from "../src/protocol";
import { headOnSnapshot, headOnTrace, quietSnapshot } from "./fixtures";

const records = headOnTrace();
const find = <K extends string>(kind: K) =>
  records.find((r) => r.kind === kind) as Extract<(typeof records)[number], { kind: K }>;

describe("fromSnapshot", () => {
  it("seeds the state from the create response", () => {
    const vm = fromSnapshot(headOnSnapshot());
    expect(vm.sessionId).toBe("fixture-head-on");
    expect(vm.scenarioId).toBe("head_on_single");
    expect(vm.clock).toBe(0);
    expect(vm.playback).toBe("paused");
    expect(vm.decision).toBe("pending");
    expect(vm.lastSeq).toBe(2);
    expect(vm.connection).toBe("connecting");
    expect(vm.decisionPoint?.trigger_time).toBe(15.0);
    expect(vm.route).toHaveLength(2);
  });
});

describe("applyRecord", () => {
  const vm = fromSnapshot(headOnSnapshot());

  it("advances ownship and traffic on ticks", () => {
    const tick = records[5] as TickRecord;
    const next = applyRecord(vm, tick);
    expect(next.ownship).toEqual(tick.ownship);
    expect(next.obstacles).toEqual(tick.obstacles);
    expect(next.clock).toBe(tick.time);
    expect(next.lastSeq).toBe(tick.seq);
    expect(vm.ownship).not.toEqual(tick.ownship); // input untouched
  });

  it("replaces the latest plan", () => {
    const plan = records.filter((r) => r.kind === "plan")[3] as PlanRecord;
    const next = applyRecord(vm, plan);
    expect(next.latestPlan.solution).toBe(plan.solution);
    expect(next.latestPlan.candidates).toHaveLength(39);
  });

  it("installs a decision point from an explanation", () => {
    const explanation = find("explanation");
    const next = applyRecord({ ...vm, decisionPoint: null }, explanation);
    expect(next.decisionPoint).toEqual(explanation.decision_point);
    expect(next.characteristic).toBe(explanation.decision_point.characteristic);
  });

  it("records the supervisor verdict", () => {
    const next = applyRecord(vm, find("decision"));
    expect(next.decision).toBe("accepted");
  });

  it("surfaces warnings as notices", () => {
    const warning: WarningRecord = {
      seq: 999,
      kind: "warning",
      time: 1.0,
      message: "step ignored: session is paused",
    };
    expect(applyRecord(vm, warning).notice).toContain("step ignored");
  });
});

describe("action table", () => {
  it("shows the route alone before any decision point", () => {
    const rows = actionRows(fromSnapshot(quietSnapshot()));
    expect(rows).toHaveLength(1);
    expect(rows[0]?.key).toBe("nominal");
    expect(rows[0]?.label).toBe("original route");
    expect(rows[0]?.courseText).toBe("000°");
    expect(rows[0]?.speedText).toBe("5.0 m/s");
  });

  it("lists proposed, original route, and alternative rows", () => {
    const vm = fromSnapshot(headOnSnapshot());
    const dp = vm.decisionPoint!;
    const rows = actionRows(vm);
    expect(rows.map((r) => r.key)).toEqual(["fact", "nominal", "alternative"]);
    expect(rows.map((r) => r.label)).toEqual(["proposed", "original route", "alternative"]);
    const fact = rows[0]!;
    expect(fact.courseText).toBe(
      `${String(((Math.round(dp.actions.fact.course_deg) % 360) + 360) % 360).padStart(3, "0")}°`,
    );
    expect(fact.speedText).toBe(`${dp.actions.fact.speed.toFixed(1)} m/s`);
    expect(rows[1]!.totalText).toBe(dp.breakdowns.nominal.total.toFixed(2));
  });
});

describe("explanations", () => {
  it("ties each box beneath its foil row with that row's tint", () => {
    const vm = fromSnapshot(headOnSnapshot());
    const entries = explanationEntries(vm);
    expect(entries).toHaveLength(2);
    expect(entries[0]?.anchor).toBe("nominal");
    expect(entries[0]?.tint).toBe(TRAJECTORY_COLORS.nominal);
    expect(entries[1]?.anchor).toBe("alternative");
    expect(entries[1]?.tint).toBe(TRAJECTORY_COLORS.alternative);
  });

  it("passes wire text through untouched", () => {
    const vm = fromSnapshot(headOnSnapshot());
    const wire = vm.decisionPoint!.explanations;
    const entries = explanationEntries(vm);
    entries.forEach((entry, i) => expect(entry.text).toBe(wire[i]!.text));
  });

  it("is empty without a decision point", () => {
    expect(explanationEntries(fromSnapshot(quietSnapshot()))).toEqual([]);
  });
});

describe("trajectory overlays", () => {
  it("layers nominal, alternative, then fact on top", () => {
    const layers = trajectoryLayers(fromSnapshot(headOnSnapshot()));
    expect(layers.map((l) => l.key)).toEqual(["nominal", "alternative", "fact"]);
    expect(layers.at(-1)?.color).toBe("#ffffff");
  });

  it("draws 121-point rollouts from the wire", () => {
    for (const layer of trajectoryLayers(fromSnapshot(headOnSnapshot()))) {
      expect(layer.points).toHaveLength(121);
    }
  });
});

describe("target table", () => {
  it("rounds ranges and bearings to whole units", () => {
    const vm = fromSnapshot(headOnSnapshot());
    const ob = vm.obstacles[0]!;
    const row = targetRows(vm)[0]!;
    expect(row.id).toBe(ob.id);
    expect(row.rangeText).toBe(`${Math.round(ob.range)} m`);
    expect(row.bearingText).toBe(`${Math.round(ob.bearing_deg)}°`);
    expect(row.cpaText).toBe(`${Math.round(ob.cpa_distance)} m`);
    expect(row.encounterText).toBe("head on");
  });
});

describe("session state helpers", () => {
  it("enables decision buttons only while pending at a decision point", () => {
    const vm = fromSnapshot(headOnSnapshot());
    expect(controlsState(vm).decisionEnabled).toBe(true);
    const decided = applyRecord(vm, find("decision"));
    expect(controlsState(decided).decisionEnabled).toBe(false);
    expect(controlsState(fromSnapshot(quietSnapshot())).decisionEnabled).toBe(false);
  });

  it("merges authoritative snapshot fields after a command", () => {
    const vm = fromSnapshot(headOnSnapshot());
    const snapshot = headOnSnapshot();
    snapshot.decision = "declined";
    snapshot.playback = "playing";
    snapshot.clock = 42.5;
    const merged = mergeSnapshot(vm, snapshot);
    expect(merged.decision).toBe("declined");
    expect(merged.playback).toBe("playing");
    expect(merged.clock).toBe(42.5);
    expect(merged.sessionId).toBe(vm.sessionId);
  });

  it("tracks connection and notices immutably", () => {
    const vm = fromSnapshot(headOnSnapshot());
    expect(withConnection(vm, "connecting")).toBe(vm); // unchanged → same object
    expect(withConnection(vm, "stale").connection).toBe("stale");
    expect(withNotice(vm, "hello").notice).toBe("hello");
    expect(vm.notice).toBeNull();
  });
});
