// Pointer-to-hand mapping for the top-down view: the mouse stands in for a
// tracked wand. The screen ray is dropped onto the flight-altitude plane
// (a direct inverse view transform in top-down), yaw comes from a modifier
// drag or the wheel, and emissions are rate limited with strictly
// increasing sequence numbers supplied by the client.

import { PoseWire } from "./protocol.js";

export const YAW_RAD_PER_PX = Math.PI / 200; // quarter turn per 100 px drag
export const MAX_INPUT_HZ = 60;

export function wrapAngle(a: number): number {
  let r = a % (2 * Math.PI);
  if (r > Math.PI) r -= 2 * Math.PI;
  if (r <= -Math.PI) r += 2 * Math.PI;
  return r;
}

export class ViewTransform {
  // Screen y grows downward; world y grows up.
  constructor(
    public centerPx: number,
    public centerPy: number,
    public scalePxPerM: number,
    public worldCx = 0,
    public worldCy = 0,
  ) {}

  worldToScreen(x: number, y: number): [number, number] {
    return [
      this.centerPx + (x - this.worldCx) * this.scalePxPerM,
      this.centerPy - (y - this.worldCy) * this.scalePxPerM,
    ];
  }

  screenToWorld(px: number, py: number): [number, number] {
    return [
      this.worldCx + (px - this.centerPx) / this.scalePxPerM,
      this.worldCy - (py - this.centerPy) / this.scalePxPerM,
    ];
  }
}

export class HandInput {
  yaw: number;

  constructor(
    public view: ViewTransform,
    public altitude: number,
    initialYaw = 0,
  ) {
    this.yaw = wrapAngle(initialYaw);
  }

  pointerToHand(px: number, py: number): PoseWire {
    const [x, y] = this.view.screenToWorld(px, py);
    return { x, y, z: this.altitude, yaw: this.yaw };
  }

  // Shift-drag (or wheel) rotates the hand about the vertical axis.
  applyYawDragPx(dxPx: number): number {
    this.yaw = wrapAngle(this.yaw + dxPx * YAW_RAD_PER_PX);
    return this.yaw;
  }
}

export class RateLimiter {
  private lastMs = -Infinity;

  constructor(public maxHz: number = MAX_INPUT_HZ) {}

  shouldEmit(nowMs: number): boolean {
    if (nowMs - this.lastMs >= 1000 / this.maxHz) {
      this.lastMs = nowMs;
      return true;
    }
    return false;
  }
}

export interface StickState {
  lx: number;
  ly: number;
  ryaw: number;
}

export function clampStick(v: number): number {
  return Math.max(-1, Math.min(1, v));
}

// WASD/arrow state to virtual sticks for joystick mode.
export function keysToSticks(keys: Set<string>): StickState {
  let lx = 0;
  let ly = 0;
  let ryaw = 0;
  if (keys.has("w") || keys.has("ArrowUp")) lx += 1;
  if (keys.has("s") || keys.has("ArrowDown")) lx -= 1;
  if (keys.has("a") || keys.has("ArrowLeft")) ly += 1;
  if (keys.has("d") || keys.has("ArrowRight")) ly -= 1;
  if (keys.has("q")) ryaw += 1;
  if (keys.has("e")) ryaw -= 1;
  return { lx: clampStick(lx), ly: clampStick(ly), ryaw: clampStick(ryaw) };
}
