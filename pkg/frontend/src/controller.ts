/**
 * Session controller: the single place state changes happen.
 *
 * Stream records and snapshot responses funnel through here into the view
 * model; UI event handlers call the command methods. DOM-free so the whole
 * decision/playback/foil flow is testable.
 */
import { Api, HttpError } from "./api";
import { Characteristic, SessionSnapshot, TraceRecord } from "./protocol";
import { ConnectionState } from "./stream";
import {
  ViewModel,
  applyRecord,
  fromSnapshot,
  mergeSnapshot,
  withConnection,
  withNotice,
} from "./viewmodel";

export type Listener = (vm: ViewModel) => void;

export class SessionController {
  private current: ViewModel;
  private listeners = new Set<Listener>();

  constructor(
    private readonly api: Api,
    snapshot: SessionSnapshot,
  ) {
    this.current = fromSnapshot(snapshot);
  }

  get vm(): ViewModel {
    return this.current;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private set(vm: ViewModel): void {
    this.current = vm;
    for (const listener of this.listeners) listener(vm);
  }

  // ---------------------------------------------------------- stream side

  handleRecord(record: TraceRecord): void {
    this.set(applyRecord(this.current, record));
  }

  handleConnection(state: ConnectionState): void {
    this.set(withConnection(this.current, state));
  }

  // --------------------------------------------------------- command side

  async play(): Promise<void> {
    await this.mutate(() => this.api.playback(this.current.sessionId, "play"));
  }

  async pause(): Promise<void> {
    await this.mutate(() => this.api.playback(this.current.sessionId, "pause"));
  }

  /** Rewind/seek; the service resets the decision to pending. */
  async seek(time: number): Promise<void> {
    await this.mutate(() => this.api.seek(this.current.sessionId, time));
  }

  /** Accept or decline the proposed maneuver. A conflict (already decided)
   * surfaces as a notice, never an exception. */
  async decide(verdict: "accepted" | "declined"): Promise<void> {
    if (this.current.decision !== "pending") {
      this.set(withNotice(this.current, `decision already ${this.current.decision}`));
      return;
    }
    await this.mutate(() => this.api.decide(this.current.sessionId, verdict));
  }

  async pickCharacteristic(characteristic: Characteristic): Promise<void> {
    await this.mutate(() => this.api.setFoil(this.current.sessionId, characteristic));
  }

  private async mutate(call: () => Promise<SessionSnapshot>): Promise<void> {
    try {
      const snapshot = await call();
      this.set(withNotice(mergeSnapshot(this.current, snapshot), null));
    } catch (err) {
      if (err instanceof HttpError) {
        this.set(withNotice(this.current, err.detail));
        return;
      }
      throw err;
    }
  }
}
