/**
 * Pure view state and its derivations.
 *
 * Everything shown in the console is computed here from wire payloads
 * alone — no costs, explanations, or geometry are re-derived client side.
 * A snapshot seeds the state; stream records advance it one at a time.
 */
import {
  DecisionPointWire,
  ExplanationWire,
  ObstacleWire,
  PlanPayload,
  RouteWaypointWire,
  SessionSnapshot,
  TraceRecord,
  VesselWire,
} from "./protocol";
import { courseDegrees, degrees, encounterLabel, metres, seconds, speed } from "./format";
import { ConnectionState } from "./stream";

/** Chart colors: proposed maneuver white, alternative orange, original route faint red. */
export const TRAJECTORY_COLORS = {
  fact: "#ffffff",
  alternative: "#ff9a3c",
  nominal: "rgba(255, 99, 99, 0.45)",
} as const;

export type TrajectoryKey = keyof typeof TRAJECTORY_COLORS;

export const TRAJECTORY_LABELS: Record<TrajectoryKey, string> = {
  fact: "proposed",
  nominal: "original route",
  alternative: "alternative",
};

/** Dots along trajectories and predictions mark fixed time intervals, so
 * their spatial gap is proportional to speed. Trajectory states are 1 s
 * apart on the wire; draw every 10th to match the 10 s prediction dots. */
export const DOT_INTERVAL_STATES = 10;

export interface ViewModel {
  sessionId: string;
  scenarioId: string;
  scenarioTitle: string;
  scenarioDescription: string;
  route: RouteWaypointWire[];
  cruiseSpeed: number;
  clock: number;
  playback: "paused" | "playing";
  decision: "pending" | "accepted" | "declined";
  characteristic: string;
  lastSeq: number;
  connection: ConnectionState;
  notice: string | null;
  ownship: VesselWire;
  obstacles: ObstacleWire[];
  decisionPoint: DecisionPointWire | null;
  latestPlan: PlanPayload;
}

export function fromSnapshot(snapshot: SessionSnapshot): ViewModel {
  return {
    sessionId: snapshot.session_id,
    scenarioId: snapshot.scenario.id,
    scenarioTitle: snapshot.scenario.title,
    scenarioDescription: snapshot.scenario.description,
    route: snapshot.scenario.route,
    cruiseSpeed: snapshot.scenario.cruise_speed,
    clock: snapshot.clock,
    playback: snapshot.playback,
    decision: snapshot.decision,
    characteristic: snapshot.characteristic,
    lastSeq: snapshot.seq,
    connection: "connecting",
    notice: null,
    ownship: snapshot.ownship,
    obstacles: snapshot.obstacles,
    decisionPoint: snapshot.decision_point,
    latestPlan: snapshot.plan,
  };
}

/** Fold one stream record into the state. Pure: returns a fresh object. */
export function applyRecord(vm: ViewModel, record: TraceRecord): ViewModel {
  const base = { ...vm, clock: record.time, lastSeq: record.seq };
  switch (record.kind) {
    case "tick":
      return { ...base, ownship: record.ownship, obstacles: record.obstacles };
    case "plan":
      return {
        ...base,
        latestPlan: {
          solution: record.solution,
          offset: record.offset,
          candidates: record.candidates,
          breakdown: record.breakdown,
        },
      };
    case "explanation":
      return {
        ...base,
        decisionPoint: record.decision_point,
        characteristic: record.decision_point.characteristic,
      };
    case "decision":
      return { ...base, decision: record.verdict };
    case "warning":
      return { ...base, notice: record.message };
  }
}

/** Scalar session fields from a freshly returned snapshot (after a POST). */
export function mergeSnapshot(vm: ViewModel, snapshot: SessionSnapshot): ViewModel {
  return {
    ...vm,
    clock: snapshot.clock,
    playback: snapshot.playback,
    decision: snapshot.decision,
    characteristic: snapshot.characteristic,
    ownship: snapshot.ownship,
    obstacles: snapshot.obstacles,
    decisionPoint: snapshot.decision_point,
    latestPlan: snapshot.plan,
  };
}

export function withConnection(vm: ViewModel, connection: ConnectionState): ViewModel {
  return vm.connection === connection ? vm : { ...vm, connection };
}

export function withNotice(vm: ViewModel, notice: string | null): ViewModel {
  return { ...vm, notice };
}

// ------------------------------------------------------------ derivations

export interface TrajectoryLayer {
  key: TrajectoryKey;
  label: string;
  color: string;
  points: Array<[number, number]>;
}

/** Overlay polylines, draw order back-to-front (fact on top). */
export function trajectoryLayers(vm: ViewModel): TrajectoryLayer[] {
  const dp = vm.decisionPoint;
  if (dp === null) return [];
  const layers: TrajectoryLayer[] = [
    { key: "nominal", label: TRAJECTORY_LABELS.nominal, color: TRAJECTORY_COLORS.nominal, points: dp.trajectories.nominal },
  ];
  if (dp.trajectories.alternative !== null) {
    layers.push({
      key: "alternative",
      label: TRAJECTORY_LABELS.alternative,
      color: TRAJECTORY_COLORS.alternative,
      points: dp.trajectories.alternative,
    });
  }
  layers.push({
    key: "fact",
    label: TRAJECTORY_LABELS.fact,
    color: TRAJECTORY_COLORS.fact,
    points: dp.trajectories.fact,
  });
  return layers;
}

export interface ActionRow {
  key: TrajectoryKey;
  label: string;
  color: string;
  courseText: string;
  speedText: string;
  totalText: string;
}

/**
 * Course and speed for the proposed, original-route, and alternative
 * maneuvers. Before a decision point exists there is nothing to compare:
 * one row shows the route being followed.
 */
export function actionRows(vm: ViewModel): ActionRow[] {
  const dp = vm.decisionPoint;
  if (dp === null) {
    return [{
      key: "nominal",
      label: TRAJECTORY_LABELS.nominal,
      color: TRAJECTORY_COLORS.nominal,
      courseText: courseDegrees(vm.ownship.course_deg),
      speedText: speed(vm.ownship.speed),
      totalText: "",
    }];
  }
  const row = (key: TrajectoryKey, action: { course_deg: number; speed: number }, total: number): ActionRow => ({
    key,
    label: TRAJECTORY_LABELS[key],
    color: TRAJECTORY_COLORS[key],
    courseText: courseDegrees(action.course_deg),
    speedText: speed(action.speed),
    totalText: total.toFixed(2),
  });
  const rows = [
    row("fact", dp.actions.fact, dp.breakdowns.fact.total),
    row("nominal", dp.actions.nominal, dp.breakdowns.nominal.total),
  ];
  if (dp.actions.alternative !== null && dp.breakdowns.alternative !== null) {
    rows.push(row("alternative", dp.actions.alternative, dp.breakdowns.alternative.total));
  }
  return rows;
}

export interface ExplanationEntry {
  /** Action row this box sits beneath — its fact-foil pairing. */
  anchor: TrajectoryKey;
  foilLabel: string;
  selectedCost: string | null;
  contrastiveSet: string[];
  text: string;
  tint: string;
}

function anchorOf(entry: ExplanationWire): TrajectoryKey {
  return entry.foil_label === TRAJECTORY_LABELS.nominal ? "nominal" : "alternative";
}

/** Explanation boxes, each tied beneath its foil's action row and tinted
 * with that row's trajectory color. Text is the wire payload, verbatim. */
export function explanationEntries(vm: ViewModel): ExplanationEntry[] {
  const dp = vm.decisionPoint;
  if (dp === null) return [];
  return dp.explanations.map((entry) => {
    const anchor = anchorOf(entry);
    return {
      anchor,
      foilLabel: entry.foil_label,
      selectedCost: entry.selected_cost,
      contrastiveSet: entry.contrastive_set,
      text: entry.text,
      tint: TRAJECTORY_COLORS[anchor],
    };
  });
}

export interface TargetRow {
  id: string;
  bearingText: string;
  rangeText: string;
  cpaText: string;
  cpaTimeText: string;
  encounterText: string;
}

export function targetRows(vm: ViewModel): TargetRow[] {
  return vm.obstacles.map((ob) => ({
    id: ob.id,
    bearingText: degrees(ob.bearing_deg),
    rangeText: metres(ob.range),
    cpaText: metres(ob.cpa_distance),
    cpaTimeText: seconds(ob.cpa_time),
    encounterText: encounterLabel(ob.encounter),
  }));
}

export interface ControlsState {
  playing: boolean;
  decision: ViewModel["decision"];
  decisionEnabled: boolean;
  characteristic: string;
  triggerTime: number | null;
}

export function controlsState(vm: ViewModel): ControlsState {
  return {
    playing: vm.playback === "playing",
    decision: vm.decision,
    decisionEnabled: vm.decision === "pending" && vm.decisionPoint !== null,
    characteristic: vm.characteristic,
    triggerTime: vm.decisionPoint?.trigger_time ?? null,
  };
}
