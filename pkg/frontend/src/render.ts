// Canvas renderer for the top-down miniature world. Draws only what the
// SceneModel holds; nothing here advances state.

import { PoseWire, SnapshotMsg } from "./protocol.js";
import { SceneState } from "./scene.js";
import { ViewTransform } from "./input.js";

export interface TaskMarkers {
  start: [number, number];
  arrival: [number, number];
  checkpoint: [number, number];
  target: [number, number];
  windowHalfwidth: number;
}

export const DEFAULT_MARKERS: TaskMarkers = {
  start: [0, -2],
  arrival: [0, 2],
  checkpoint: [0, 0],
  target: [5, 0],
  windowHalfwidth: 0.5,
};

function drawUav(
  ctx: CanvasRenderingContext2D,
  view: ViewTransform,
  pose: PoseWire,
  color: string,
  alpha: number,
): void {
  const [px, py] = view.worldToScreen(pose.x, pose.y);
  const r = 0.18 * view.scalePxPerM;
  ctx.save();
  ctx.globalAlpha = alpha;
  ctx.translate(px, py);
  ctx.rotate(-pose.yaw); // screen y is flipped, so CCW world yaw turns CW here
  ctx.beginPath();
  ctx.moveTo(r, 0);
  ctx.lineTo(-0.6 * r, 0.55 * r);
  ctx.lineTo(-0.3 * r, 0);
  ctx.lineTo(-0.6 * r, -0.55 * r);
  ctx.closePath();
  ctx.fillStyle = color;
  ctx.fill();
  ctx.restore();
}

function drawDot(
  ctx: CanvasRenderingContext2D,
  view: ViewTransform,
  at: [number, number],
  radiusM: number,
  color: string,
  label: string,
): void {
  const [px, py] = view.worldToScreen(at[0], at[1]);
  ctx.beginPath();
  ctx.arc(px, py, radiusM * view.scalePxPerM, 0, 2 * Math.PI);
  ctx.fillStyle = color;
  ctx.fill();
  ctx.fillStyle = "#202124";
  ctx.font = "12px sans-serif";
  ctx.fillText(label, px + 8, py - 8);
}

export function renderScene(
  ctx: CanvasRenderingContext2D,
  view: ViewTransform,
  scene: SceneState,
  markers: TaskMarkers = DEFAULT_MARKERS,
): void {
  const canvas = ctx.canvas;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#f8f9fa";
  ctx.fillRect(0, 0, canvas.width, canvas.height);

  // Reference path and task markers.
  const [sx, sy] = view.worldToScreen(...markers.start);
  const [ax, ay] = view.worldToScreen(...markers.arrival);
  ctx.strokeStyle = "#c0c4c9";
  ctx.setLineDash([6, 4]);
  ctx.beginPath();
  ctx.moveTo(sx, sy);
  ctx.lineTo(ax, ay);
  ctx.stroke();
  ctx.setLineDash([]);

  drawDot(ctx, view, markers.start, 0.08, "#188038", "S");
  drawDot(ctx, view, markers.arrival, 0.08, "#7b1fa2", "A");
  drawDot(ctx, view, markers.checkpoint, 0.06, "#f29900", "C");
  drawDot(ctx, view, markers.target, 0.22, "#d93025", "target");
  // Window tripods either side of the checkpoint.
  const w = markers.windowHalfwidth;
  drawDot(ctx, view, [markers.checkpoint[0] - w, markers.checkpoint[1]], 0.04, "#202124", "");
  drawDot(ctx, view, [markers.checkpoint[0] + w, markers.checkpoint[1]], 0.04, "#202124", "");

  const snap: SnapshotMsg | null = scene.snapshot;
  if (snap !== null) {
    drawUav(ctx, view, snap.phantom, "#5f6368", 0.55); // phantom: last known pose
    drawUav(ctx, view, snap.vuav, scene.vuavColor, 1.0); // the leader in the hand
  }

  if (scene.staleBadge) {
    ctx.fillStyle = "#d93025";
    ctx.font = "bold 14px sans-serif";
    ctx.fillText("STALE FEEDBACK", 12, 22);
  }
  if (scene.connectionLost) {
    ctx.fillStyle = "rgba(32,33,36,0.75)";
    ctx.fillRect(0, canvas.height / 2 - 24, canvas.width, 48);
    ctx.fillStyle = "#fff";
    ctx.font = "bold 16px sans-serif";
    ctx.textAlign = "center";
    ctx.fillText("connection lost - scene frozen, reconnecting", canvas.width / 2, canvas.height / 2 + 5);
    ctx.textAlign = "start";
  }
}

export function renderSpeedMeter(el: HTMLElement, speed: number): void {
  el.style.width = `${Math.round(Math.min(Math.max(speed, 0), 1) * 100)}%`;
}
