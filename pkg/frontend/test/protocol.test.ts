import assert from "node:assert/strict";
import { test } from "node:test";

import {
  parseServerMessage,
  ProtocolError,
  PROTOCOL_VERSION,
  SnapshotMsg,
  VersionMismatchError,
} from "../src/protocol.js";

function snapshotJson(overrides: Record<string, unknown> = {}): string {
  return JSON.stringify({
    v: PROTOCOL_VERSION,
    type: "snapshot",
    sid: "s1",
    seq: 4,
    tick: 120,
    t: 1.2,
    mode: "dream",
    vuav: { x: 0, y: -2, z: 1, yaw: 0.4 },
    phantom: { x: 0, y: -2.05, z: 1, yaw: 0.4 },
    staleness_s: 0.06,
    visual: "can_be_taken",
    speed: 0.3,
    recording: true,
    read_only: false,
    ...overrides,
  });
}

test("parses a valid snapshot", () => {
  const msg = parseServerMessage(snapshotJson()) as SnapshotMsg;
  assert.equal(msg.type, "snapshot");
  assert.equal(msg.phantom.y, -2.05);
  assert.equal(msg.staleness_s, 0.06);
});

test("parses hello and error frames", () => {
  const hello = parseServerMessage(
    JSON.stringify({
      v: PROTOCOL_VERSION,
      type: "hello",
      sid: "s1",
      mode: "dream",
      read_only: true,
      tick_rate_hz: 100,
      broadcast_hz: 30,
      version: "0.1.0",
    }),
  );
  assert.equal(hello.type, "hello");
  const err = parseServerMessage(
    JSON.stringify({ v: PROTOCOL_VERSION, type: "error", sid: "s1", error: "read_only", detail: "no" }),
  );
  assert.equal(err.type, "error");
});

test("rejects invalid JSON and non-objects", () => {
  assert.throws(() => parseServerMessage("{oops"), ProtocolError);
  assert.throws(() => parseServerMessage("42"), ProtocolError);
});

test("rejects unknown message type", () => {
  assert.throws(
    () => parseServerMessage(JSON.stringify({ v: PROTOCOL_VERSION, type: "teleport" })),
    ProtocolError,
  );
});

test("version mismatch is its own error", () => {
  assert.throws(() => parseServerMessage(snapshotJson({ v: 99 })), VersionMismatchError);
});

test("rejects malformed snapshot poses", () => {
  assert.throws(
    () => parseServerMessage(snapshotJson({ phantom: { x: 0, y: 0, z: 1 } })),
    ProtocolError,
  );
  assert.throws(
    () => parseServerMessage(snapshotJson({ staleness_s: "old" })),
    ProtocolError,
  );
});
