/**
 * Ordered delivery of trace records from the event stream.
 *
 * The service stamps every SSE frame with `id: <seq>`. Frames can arrive
 * out of order across reconnects, and replays after a resume can repeat
 * records already seen; the buffer releases records strictly in sequence
 * and swallows duplicates. Gaps simply hold later records until the
 * missing one arrives.
 */
import {
  SSE_EVENT_KINDS,
  TraceRecord,
  parseRecord,
} from "./protocol";

export class SequencedBuffer {
  private next: number;
  private pending = new Map<number, TraceRecord>();

  /** `lastSeen` is the highest seq already applied (-1 for none). */
  constructor(lastSeen: number) {
    this.next = lastSeen + 1;
  }

  get expected(): number {
    return this.next;
  }

  get held(): number {
    return this.pending.size;
  }

  /** Accept one record; return everything now deliverable, in order. */
  push(record: TraceRecord): TraceRecord[] {
    if (record.seq < this.next || this.pending.has(record.seq)) {
      return []; // duplicate or already-applied replay
    }
    this.pending.set(record.seq, record);
    const ready: TraceRecord[] = [];
    for (;;) {
      const hit = this.pending.get(this.next);
      if (hit === undefined) break;
      this.pending.delete(this.next);
      ready.push(hit);
      this.next += 1;
    }
    return ready;
  }
}

export type ConnectionState = "connecting" | "live" | "stale";

export interface StreamHandlers {
  onRecord: (record: TraceRecord) => void;
  onState: (state: ConnectionState) => void;
}

/**
 * Open the session's event stream. Resumes from `lastSeen`; on drops the
 * browser reconnects on its own (Last-Event-ID) and the buffer discards
 * whatever the replay repeats. Returns a close function.
 */
export function connectEvents(
  sessionId: string,
  lastSeen: number,
  handlers: StreamHandlers,
  base = "",
): () => void {
  const url = `${base}/api/sessions/${encodeURIComponent(sessionId)}/events?since=${lastSeen}`;
  const source = new EventSource(url);
  const buffer = new SequencedBuffer(lastSeen);
  handlers.onState("connecting");
  for (const eventName of Object.keys(SSE_EVENT_KINDS)) {
    source.addEventListener(eventName, (event: MessageEvent<string>) => {
      for (const record of buffer.push(parseRecord(event.data))) {
        handlers.onRecord(record);
      }
    });
  }
  source.onopen = () => handlers.onState("live");
  source.onerror = () => handlers.onState("stale");
  return () => source.close();
}
