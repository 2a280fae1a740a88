/**
 * Real wire payloads captured from the session service: a full accepted
 * head-on run (NDJSON trace) and fresh-session snapshots. Tests replay
 * these verbatim so every assertion runs against genuine server output.
 */
import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { SessionSnapshot, TraceRecord, parseTrace } from "../src/protocol";

const here = dirname(fileURLToPath(import.meta.url));

export function fixtureText(name: string): string {
  return readFileSync(join(here, "fixtures", name), "utf-8");
}

export function headOnTrace(): TraceRecord[] {
  return parseTrace(fixtureText("head_on_accepted.ndjson"));
}

export function headOnSnapshot(): SessionSnapshot {
  return JSON.parse(fixtureText("snapshot_head_on.json")) as SessionSnapshot;
}

export function quietSnapshot(): SessionSnapshot {
  return JSON.parse(fixtureText("snapshot_quiet.json")) as SessionSnapshot;
}
