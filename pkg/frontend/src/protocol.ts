/**
 * Wire types for the session service.
 *
 * These mirror the HTTP snapshot and NDJSON/SSE record schemas exactly;
 * the console renders these payloads and computes nothing of its own.
 */

export interface VesselWire {
  time: number;
  north: number;
  east: number;
  course_deg: number;
  speed: number;
}

export interface ObstacleWire {
  id: string;
  north: number;
  east: number;
  course_deg: number;
  speed: number;
  length: number;
  width: number;
  bearing_deg: number;
  range: number;
  cpa_distance: number;
  cpa_time: number;
  encounter: string;
  /** [north, east] dots at fixed 10 s spacing — spatial gap scales with speed. */
  predicted: Array<[number, number]>;
}

export interface OffsetWire {
  course_offset_deg: number;
  speed_multiplier: number;
}

export interface CandidateWire extends OffsetWire {
  total: number;
}

export interface MeasuresWire {
  cpa_distance: number | null;
  cpa_obstacle_id: string | null;
  colreg_rule: number | null;
  transition_behavior: string;
  speed_offset: number;
  course_offset_deg: number;
}

export interface BreakdownWire {
  components: Record<string, number>;
  total: number;
  measures: MeasuresWire;
}

export interface ExplanationWire {
  fact: number;
  foil: number | null;
  foil_label: string;
  contrastive_set: string[];
  selected_cost: string | null;
  fact_measure: unknown;
  foil_measure: unknown;
  text: string;
}

export interface ActionWire {
  course_deg: number;
  speed: number;
}

export interface DecisionPointWire {
  trigger_time: number;
  characteristic: string;
  fact: number;
  nominal: number;
  alternative: number | null;
  references: ActionWire;
  candidates: CandidateWire[];
  breakdowns: {
    fact: BreakdownWire;
    nominal: BreakdownWire;
    alternative: BreakdownWire | null;
  };
  actions: {
    fact: ActionWire;
    nominal: ActionWire;
    alternative: ActionWire | null;
  };
  trajectories: {
    fact: Array<[number, number]>;
    nominal: Array<[number, number]>;
    alternative: Array<[number, number]> | null;
  };
  explanations: ExplanationWire[];
}

export interface PlanPayload {
  solution: number;
  offset: OffsetWire;
  candidates: CandidateWire[];
  breakdown: BreakdownWire;
}

export interface RouteWaypointWire {
  north: number;
  east: number;
  acceptance_radius: number;
}

export interface ScenarioSummary {
  id: string;
  title: string;
  description: string;
  foil_characteristic: string;
  obstacles: number;
}

export interface SessionSnapshot {
  session_id: string;
  scenario: {
    id: string;
    title: string;
    description: string;
    foil_characteristic: string;
    cruise_speed: number;
    route: RouteWaypointWire[];
  };
  clock: number;
  playback: "paused" | "playing";
  decision: "pending" | "accepted" | "declined";
  characteristic: string;
  seq: number;
  ownship: VesselWire;
  obstacles: ObstacleWire[];
  decision_point: DecisionPointWire | null;
  plan: PlanPayload;
}

interface RecordBase {
  seq: number;
  time: number;
}

export interface TickRecord extends RecordBase {
  kind: "tick";
  ownship: VesselWire;
  obstacles: ObstacleWire[];
}

export interface PlanRecord extends RecordBase, PlanPayload {
  kind: "plan";
}

export interface ExplanationRecord extends RecordBase {
  kind: "explanation";
  decision_point: DecisionPointWire;
}

export interface DecisionRecord extends RecordBase {
  kind: "decision";
  verdict: "accepted" | "declined";
}

export interface WarningRecord extends RecordBase {
  kind: "warning";
  message: string;
}

export type TraceRecord =
  | TickRecord
  | PlanRecord
  | ExplanationRecord
  | DecisionRecord
  | WarningRecord;

export const RECORD_KINDS = [
  "tick",
  "plan",
  "explanation",
  "decision",
  "warning",
] as const;

/** SSE event name → record kind, exactly as the service emits them. */
export const SSE_EVENT_KINDS: Record<string, TraceRecord["kind"]> = {
  state: "tick",
  plan: "plan",
  explanation: "explanation",
  "decision-recorded": "decision",
  warning: "warning",
};

export const CHARACTERISTICS = [
  "reduced_speed",
  "port_turn",
  "starboard_turn",
  "closer_to_route",
  "farther_from_route",
] as const;

export type Characteristic = (typeof CHARACTERISTICS)[number];

export class ProtocolError extends Error {}

/** Parse one NDJSON line / SSE data payload into a typed record. */
export function parseRecord(json: string): TraceRecord {
  let raw: unknown;
  try {
    raw = JSON.parse(json);
  } catch (err) {
    throw new ProtocolError(`record is not valid JSON: ${String(err)}`);
  }
  return asRecord(raw);
}

export function asRecord(raw: unknown): TraceRecord {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new ProtocolError("record must be a JSON object");
  }
  const rec = raw as { seq?: unknown; kind?: unknown; time?: unknown };
  if (typeof rec.seq !== "number" || typeof rec.time !== "number") {
    throw new ProtocolError("record needs numeric seq and time");
  }
  if (!RECORD_KINDS.includes(rec.kind as (typeof RECORD_KINDS)[number])) {
    throw new ProtocolError(`unknown record kind ${JSON.stringify(rec.kind)}`);
  }
  return raw as TraceRecord;
}

export function parseTrace(ndjson: string): TraceRecord[] {
  return ndjson
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map(parseRecord);
}
