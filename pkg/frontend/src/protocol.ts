// Wire protocol shared with the session service: one JSON message per
// WebSocket frame, version tagged.

export const PROTOCOL_VERSION = 1;

export interface PoseWire {
  x: number;
  y: number;
  z: number;
  yaw: number;
}

export interface HelloMsg {
  v: number;
  type: "hello";
  sid: string;
  mode: string;
  read_only: boolean;
  tick_rate_hz: number;
  broadcast_hz: number;
  version: string;
}

export interface SnapshotMsg {
  v: number;
  type: "snapshot";
  sid: string;
  seq: number;
  tick: number;
  t: number;
  mode: string;
  vuav: PoseWire;
  phantom: PoseWire;
  staleness_s: number;
  visual: string;
  speed: number;
  recording: boolean;
  read_only: boolean;
}

export interface EventMsg {
  v: number;
  type: "event";
  sid: string;
  t: number;
  event: string;
  payload: Record<string, unknown>;
}

export interface ErrorMsg {
  v: number;
  type: "error";
  sid: string;
  error: string;
  detail: string;
}

export type ServerMessage = HelloMsg | SnapshotMsg | EventMsg | ErrorMsg;

export class ProtocolError extends Error {}

export class VersionMismatchError extends ProtocolError {
  constructor(got: unknown) {
    super(`incompatible protocol: expected v${PROTOCOL_VERSION}, got ${String(got)}`);
  }
}

function isFiniteNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function isPose(v: unknown): v is PoseWire {
  if (typeof v !== "object" || v === null) return false;
  const p = v as Record<string, unknown>;
  return (
    isFiniteNumber(p.x) && isFiniteNumber(p.y) && isFiniteNumber(p.z) && isFiniteNumber(p.yaw)
  );
}

export function parseServerMessage(text: string): ServerMessage {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch {
    throw new ProtocolError("message is not valid JSON");
  }
  if (typeof data !== "object" || data === null) {
    throw new ProtocolError("message must be a JSON object");
  }
  const msg = data as Record<string, unknown>;
  if (msg.v !== PROTOCOL_VERSION) {
    throw new VersionMismatchError(msg.v);
  }
  switch (msg.type) {
    case "hello":
      if (typeof msg.sid !== "string" || typeof msg.read_only !== "boolean") {
        throw new ProtocolError("malformed hello");
      }
      return msg as unknown as HelloMsg;
    case "snapshot": {
      if (
        typeof msg.sid !== "string" ||
        !isFiniteNumber(msg.seq) ||
        !isFiniteNumber(msg.t) ||
        !isPose(msg.vuav) ||
        !isPose(msg.phantom) ||
        !isFiniteNumber(msg.staleness_s) ||
        typeof msg.visual !== "string" ||
        !isFiniteNumber(msg.speed)
      ) {
        throw new ProtocolError("malformed snapshot");
      }
      return msg as unknown as SnapshotMsg;
    }
    case "event":
      if (typeof msg.event !== "string") throw new ProtocolError("malformed event");
      return msg as unknown as EventMsg;
    case "error":
      if (typeof msg.error !== "string") throw new ProtocolError("malformed error message");
      return msg as unknown as ErrorMsg;
    default:
      throw new ProtocolError(`unknown message type ${String(msg.type)}`);
  }
}

export interface HandInputMsg {
  v: number;
  sid: string;
  seq: number;
  type: "hand";
  pose: PoseWire;
  take: boolean;
}

export interface SticksInputMsg {
  v: number;
  sid: string;
  seq: number;
  type: "sticks";
  lx: number;
  ly: number;
  ryaw: number;
}

export interface ControlInputMsg {
  v: number;
  sid: string;
  seq: number;
  type: "control";
  action: "start" | "stop" | "reset" | "mode";
  mode?: "dream" | "joystick";
}

export type ClientMessage = HandInputMsg | SticksInputMsg | ControlInputMsg;
