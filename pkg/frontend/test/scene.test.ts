import assert from "node:assert/strict";
import { test } from "node:test";

import { PROTOCOL_VERSION, SnapshotMsg } from "../src/protocol.js";
import { SceneModel, STALE_BADGE_THRESHOLD_S, VISUAL_COLORS } from "../src/scene.js";

function snap(overrides: Partial<SnapshotMsg> = {}): SnapshotMsg {
  return {
    v: PROTOCOL_VERSION,
    type: "snapshot",
    sid: "s1",
    seq: 1,
    tick: 0,
    t: 0,
    mode: "dream",
    vuav: { x: 0, y: -2, z: 1, yaw: 0 },
    phantom: { x: 0, y: -2, z: 1, yaw: 0 },
    staleness_s: 0.06,
    visual: "cannot_be_taken",
    speed: 0,
    recording: false,
    read_only: false,
    ...overrides,
  };
}

test("snapshot is the only source of scene content", () => {
  const scene = new SceneModel();
  const before = scene.current.snapshot;
  assert.equal(before, null);
  scene.applySnapshot(snap({ seq: 2, vuav: { x: 0.5, y: 0, z: 1, yaw: 0.3 } }));
  const after = scene.current.snapshot;
  assert.equal(after?.vuav.x, 0.5);
});

test("disconnect freezes the scene with no extrapolation", () => {
  const scene = new SceneModel();
  scene.markConnected();
  const moving = snap({
    seq: 9,
    vuav: { x: 0.4, y: 1.0, z: 1, yaw: 0.2 },
    phantom: { x: 0.35, y: 0.9, z: 1, yaw: 0.21 },
    speed: 0.8,
  });
  scene.applySnapshot(moving);
  const before = JSON.stringify(scene.current.snapshot);

  scene.markDisconnected();
  // Whatever time passes, there is no tick/advance API: state is frozen.
  assert.equal(JSON.stringify(scene.current.snapshot), before);
  assert.equal(scene.current.connectionLost, true);
  assert.equal(scene.current.connected, false);

  // Reconnect resumes from server truth only.
  scene.markConnected();
  assert.equal(JSON.stringify(scene.current.snapshot), before);
  scene.applySnapshot(snap({ seq: 10, vuav: { x: 0.41, y: 1.05, z: 1, yaw: 0.2 } }));
  assert.equal(scene.current.snapshot?.vuav.y, 1.05);
});

test("stale badge follows the threshold", () => {
  const scene = new SceneModel();
  scene.applySnapshot(snap({ staleness_s: STALE_BADGE_THRESHOLD_S - 0.01 }));
  assert.equal(scene.current.staleBadge, false);
  scene.applySnapshot(snap({ staleness_s: 1.0 }));
  assert.equal(scene.current.staleBadge, true);
});

test("vuav color strictly follows the visual state", () => {
  const scene = new SceneModel();
  for (const visual of ["can_be_taken", "cannot_be_taken", "is_taken"] as const) {
    scene.applySnapshot(snap({ visual }));
    assert.equal(scene.current.vuavColor, VISUAL_COLORS[visual]);
  }
  scene.applySnapshot(snap({ visual: "glowing" }));
  assert.equal(scene.current.vuavColor, VISUAL_COLORS.cannot_be_taken);
});

test("read-only flag propagates from snapshots", () => {
  const scene = new SceneModel();
  scene.applySnapshot(snap({ read_only: true }));
  assert.equal(scene.current.readOnly, true);
});
