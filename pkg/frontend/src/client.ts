// Reconnecting protocol client. Socket construction and timers are
// injectable so the logic is testable without a browser or a server.

import { reconnectDelayMs } from "./backoff.js";
import {
  ClientMessage,
  ErrorMsg,
  EventMsg,
  HelloMsg,
  PoseWire,
  PROTOCOL_VERSION,
  parseServerMessage,
  ProtocolError,
  SnapshotMsg,
  VersionMismatchError,
} from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface Scheduler {
  setTimeout(fn: () => void, ms: number): unknown;
  clearTimeout(handle: unknown): void;
}

export interface ClientCallbacks {
  onHello?: (msg: HelloMsg) => void;
  onSnapshot?: (msg: SnapshotMsg) => void;
  onEvent?: (msg: EventMsg) => void;
  onServerError?: (msg: ErrorMsg) => void;
  onStatus?: (status: ClientStatus) => void;
}

export type ClientStatus =
  | "connecting"
  | "connected"
  | "reconnecting"
  | "closed"
  | "incompatible";

const defaultSocketFactory: SocketFactory = (url) =>
  new WebSocket(url) as unknown as SocketLike;

const defaultScheduler: Scheduler = {
  setTimeout: (fn, ms) => setTimeout(fn, ms),
  clearTimeout: (h) => clearTimeout(h as Parameters<typeof clearTimeout>[0]),
};

export class TeleopClient {
  readonly url: string;
  private readonly factory: SocketFactory;
  private readonly scheduler: Scheduler;
  private readonly callbacks: ClientCallbacks;
  private socket: SocketLike | null = null;
  private seq = 0;
  private sid = "";
  private attempts = 0;
  private timer: unknown = null;
  private stopped = false;
  status: ClientStatus = "closed";
  readOnly = false;
  incompatible = false;

  constructor(
    url: string,
    callbacks: ClientCallbacks = {},
    factory: SocketFactory = defaultSocketFactory,
    scheduler: Scheduler = defaultScheduler,
  ) {
    this.url = url;
    this.callbacks = callbacks;
    this.factory = factory;
    this.scheduler = scheduler;
  }

  // Sequence numbers are strictly increasing for the whole client lifetime,
  // surviving reconnects, so the server's stale-input guard stays coherent.
  nextSeq(): number {
    return this.seq++;
  }

  get sessionId(): string {
    return this.sid;
  }

  connect(): void {
    this.stopped = false;
    this.open();
  }

  private setStatus(status: ClientStatus): void {
    this.status = status;
    this.callbacks.onStatus?.(status);
  }

  private open(): void {
    this.setStatus(this.attempts === 0 ? "connecting" : "reconnecting");
    const sock = this.factory(this.url);
    this.socket = sock;
    sock.onopen = () => {
      this.attempts = 0;
      this.setStatus("connected");
    };
    sock.onmessage = (ev) => this.handleMessage(ev.data);
    sock.onerror = () => {
      /* the close handler will schedule the retry */
    };
    sock.onclose = () => {
      this.socket = null;
      if (this.stopped || this.incompatible) {
        this.setStatus(this.incompatible ? "incompatible" : "closed");
        return;
      }
      this.scheduleReconnect();
    };
  }

  private scheduleReconnect(): void {
    const delay = reconnectDelayMs(this.attempts);
    this.attempts += 1;
    this.setStatus("reconnecting");
    this.timer = this.scheduler.setTimeout(() => this.open(), delay);
  }

  private handleMessage(text: string): void {
    let msg;
    try {
      msg = parseServerMessage(text);
    } catch (err) {
      if (err instanceof VersionMismatchError) {
        this.incompatible = true;
        this.setStatus("incompatible");
        this.socket?.close();
        return;
      }
      if (err instanceof ProtocolError) {
        // Malformed frame: never applied to the scene (it stays frozen at
        // the last good snapshot); surface it so the UI can show a banner.
        this.callbacks.onServerError?.({
          v: PROTOCOL_VERSION,
          type: "error",
          sid: this.sid,
          error: "protocol",
          detail: err.message,
        });
        return;
      }
      throw err;
    }
    switch (msg.type) {
      case "hello":
        this.sid = msg.sid;
        this.readOnly = msg.read_only;
        this.callbacks.onHello?.(msg);
        break;
      case "snapshot":
        this.callbacks.onSnapshot?.(msg);
        break;
      case "event":
        this.callbacks.onEvent?.(msg);
        break;
      case "error":
        if (msg.error === "version_mismatch") {
          this.incompatible = true;
          this.setStatus("incompatible");
          this.socket?.close();
        }
        this.callbacks.onServerError?.(msg);
        break;
    }
  }

  private sendRaw(msg: ClientMessage): boolean {
    if (this.socket === null || this.status !== "connected" || this.sid === "") return false;
    this.socket.send(JSON.stringify(msg));
    return true;
  }

  sendHand(pose: PoseWire, take: boolean): boolean {
    if (this.readOnly) return false;
    return this.sendRaw({
      v: PROTOCOL_VERSION,
      sid: this.sid,
      seq: this.nextSeq(),
      type: "hand",
      pose,
      take,
    });
  }

  sendSticks(lx: number, ly: number, ryaw: number): boolean {
    if (this.readOnly) return false;
    return this.sendRaw({
      v: PROTOCOL_VERSION,
      sid: this.sid,
      seq: this.nextSeq(),
      type: "sticks",
      lx,
      ly,
      ryaw,
    });
  }

  sendControl(action: "start" | "stop" | "reset" | "mode", mode?: "dream" | "joystick"): boolean {
    const msg: ClientMessage = {
      v: PROTOCOL_VERSION,
      sid: this.sid,
      seq: this.nextSeq(),
      type: "control",
      action,
      ...(mode !== undefined ? { mode } : {}),
    };
    return this.sendRaw(msg);
  }

  disconnect(): void {
    this.stopped = true;
    if (this.timer !== null) {
      this.scheduler.clearTimeout(this.timer);
      this.timer = null;
    }
    this.socket?.close();
    this.socket = null;
    this.setStatus("closed");
  }
}
