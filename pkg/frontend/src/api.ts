/**
 * Thin typed client for the session service. Every mutation returns the
 * fresh session snapshot the service responds with.
 */
import {
  Characteristic,
  ScenarioSummary,
  SessionSnapshot,
  TraceRecord,
  parseTrace,
} from "./protocol";

export class HttpError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface Api {
  listScenarios(): Promise<ScenarioSummary[]>;
  createSession(scenarioId: string): Promise<SessionSnapshot>;
  getSnapshot(sessionId: string): Promise<SessionSnapshot>;
  playback(sessionId: string, action: "play" | "pause"): Promise<SessionSnapshot>;
  seek(sessionId: string, time: number): Promise<SessionSnapshot>;
  decide(sessionId: string, verdict: "accepted" | "declined"): Promise<SessionSnapshot>;
  setFoil(sessionId: string, characteristic: Characteristic): Promise<SessionSnapshot>;
  fetchTrace(sessionId: string): Promise<TraceRecord[]>;
  traceUrl(sessionId: string): string;
}

export function makeApi(fetchImpl?: FetchLike, base = ""): Api {
  const doFetch: FetchLike = fetchImpl ?? ((url, init) => fetch(url, init));

  async function request<T>(url: string, init?: RequestInit): Promise<T> {
    const response = await doFetch(base + url, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new HttpError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  function post<T>(url: string, payload: unknown): Promise<T> {
    return request<T>(url, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  return {
    listScenarios: () => request("/api/scenarios"),
    createSession: (scenarioId) => post("/api/sessions", { scenario_id: scenarioId }),
    getSnapshot: (sessionId) => request(`/api/sessions/${sessionId}`),
    playback: (sessionId, action) =>
      post(`/api/sessions/${sessionId}/playback`, { action }),
    seek: (sessionId, time) =>
      post(`/api/sessions/${sessionId}/playback`, { action: "seek", time }),
    decide: (sessionId, verdict) =>
      post(`/api/sessions/${sessionId}/decision`, { verdict }),
    setFoil: (sessionId, characteristic) =>
      post(`/api/sessions/${sessionId}/foil`, { characteristic }),
    fetchTrace: async (sessionId) => {
      const response = await doFetch(`${base}/api/sessions/${sessionId}/trace`);
      if (!response.ok) throw new HttpError(response.status, response.statusText);
      return parseTrace(await response.text());
    },
    traceUrl: (sessionId) => `${base}/api/sessions/${sessionId}/trace`,
  };
}
