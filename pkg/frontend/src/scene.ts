// Scene state: a pure projection of the latest snapshot. There is no
// interpolation or extrapolation anywhere in here by design; if the link
// dies, the scene freezes at the last server-confirmed state.

import { SnapshotMsg } from "./protocol.js";

export const STALE_BADGE_THRESHOLD_S = 0.3;

export const VISUAL_COLORS: Record<string, string> = {
  can_be_taken: "#34a853", // green: grabbable
  cannot_be_taken: "#9aa0a6", // gray: out of reach
  is_taken: "#f9ab00", // amber: held
};

export interface SceneState {
  snapshot: SnapshotMsg | null;
  connected: boolean;
  connectionLost: boolean;
  staleBadge: boolean;
  vuavColor: string;
  readOnly: boolean;
}

export class SceneModel {
  private state: SceneState = {
    snapshot: null,
    connected: false,
    connectionLost: false,
    staleBadge: false,
    vuavColor: VISUAL_COLORS.cannot_be_taken,
    readOnly: false,
  };

  // The single place scene content may change: a server snapshot.
  applySnapshot(snap: SnapshotMsg): void {
    this.state.snapshot = snap;
    this.state.staleBadge = snap.staleness_s > STALE_BADGE_THRESHOLD_S;
    this.state.vuavColor = VISUAL_COLORS[snap.visual] ?? VISUAL_COLORS.cannot_be_taken;
    this.state.readOnly = snap.read_only;
  }

  markConnected(): void {
    this.state.connected = true;
    this.state.connectionLost = false;
  }

  markDisconnected(): void {
    this.state.connected = false;
    this.state.connectionLost = true;
    // Poses stay exactly as last rendered: frozen, not extrapolated.
  }

  get current(): Readonly<SceneState> {
    return this.state;
  }
}
