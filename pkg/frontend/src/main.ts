// Browser entry point: wires the socket client, scene model, renderer, and
// pointer/keyboard input together.

import { SpeedTone } from "./audio.js";
import { TeleopClient } from "./client.js";
import { HandInput, RateLimiter, ViewTransform, keysToSticks } from "./input.js";
import { renderScene, renderSpeedMeter } from "./render.js";
import { SceneModel } from "./scene.js";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el as T;
}

const canvas = byId<HTMLCanvasElement>("scene");
const ctx = canvas.getContext("2d");
if (ctx === null) throw new Error("2d canvas unsupported");

const statusEl = byId<HTMLSpanElement>("status");
const modeSel = byId<HTMLSelectElement>("mode");
const speedMeter = byId<HTMLDivElement>("speed-fill");
const staleEl = byId<HTMLSpanElement>("staleness");
const muteBtn = byId<HTMLButtonElement>("mute");
const resetBtn = byId<HTMLButtonElement>("reset");

const view = new ViewTransform(canvas.width / 2, canvas.height / 2, 80, 1.0, 0.0);
const scene = new SceneModel();
const hand = new HandInput(view, 1.0);
const limiter = new RateLimiter();
const tone = new SpeedTone();
let pointerDown = false;
let lastPointer: [number, number] | null = null;
let mode = "dream";
const keys = new Set<string>();

const url = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`;
const client = new TeleopClient(url, {
  onHello: (msg) => {
    mode = msg.mode;
    modeSel.value = msg.mode;
    const controls = !msg.read_only;
    modeSel.disabled = !controls;
    resetBtn.disabled = !controls;
    canvas.style.pointerEvents = controls ? "auto" : "none";
  },
  onSnapshot: (snap) => {
    scene.applySnapshot(snap);
    mode = snap.mode;
    staleEl.textContent = `${(snap.staleness_s * 1000).toFixed(0)} ms`;
    renderSpeedMeter(speedMeter, snap.speed);
    tone.setIntensity(snap.speed);
    draw();
  },
  onStatus: (status) => {
    statusEl.textContent = status;
    if (status === "connected") scene.markConnected();
    if (status === "reconnecting" || status === "closed") scene.markDisconnected();
    if (status === "incompatible") statusEl.textContent = "incompatible protocol version";
    draw();
  },
  onServerError: (err) => {
    statusEl.textContent = `${err.error}: ${err.detail}`;
  },
});

function draw(): void {
  renderScene(ctx!, view, scene.current);
}

function sendHandNow(ev: PointerEvent, take: boolean): void {
  const rect = canvas.getBoundingClientRect();
  const pose = hand.pointerToHand(ev.clientX - rect.left, ev.clientY - rect.top);
  client.sendHand(pose, take);
}

canvas.addEventListener("pointerdown", (ev) => {
  if (mode !== "dream") return;
  pointerDown = true;
  lastPointer = [ev.clientX, ev.clientY];
  canvas.setPointerCapture(ev.pointerId);
  sendHandNow(ev, true);
});

canvas.addEventListener("pointermove", (ev) => {
  if (mode !== "dream") return;
  if (!limiter.shouldEmit(performance.now())) return;
  if (ev.shiftKey && pointerDown && lastPointer !== null) {
    hand.applyYawDragPx(ev.clientX - lastPointer[0]);
  }
  lastPointer = [ev.clientX, ev.clientY];
  sendHandNow(ev, pointerDown);
});

canvas.addEventListener("pointerup", (ev) => {
  if (mode !== "dream") return;
  pointerDown = false;
  sendHandNow(ev, false);
});

canvas.addEventListener("wheel", (ev) => {
  if (mode !== "dream") return;
  ev.preventDefault();
  hand.applyYawDragPx(ev.deltaY * 0.5);
});

window.addEventListener("keydown", (ev) => {
  keys.add(ev.key);
});
window.addEventListener("keyup", (ev) => {
  keys.delete(ev.key);
});

// Joystick mode pumps the key-derived sticks at the input rate.
setInterval(() => {
  if (mode !== "joystick" || client.status !== "connected") return;
  const sticks = keysToSticks(keys);
  client.sendSticks(sticks.lx, sticks.ly, sticks.ryaw);
}, 1000 / 30);

modeSel.addEventListener("change", () => {
  client.sendControl("mode", modeSel.value as "dream" | "joystick");
});

resetBtn.addEventListener("click", () => {
  client.sendControl("reset");
});

muteBtn.addEventListener("click", () => {
  if (tone.muted) {
    tone.enable();
    muteBtn.textContent = "mute speed tone";
  } else {
    tone.mute();
    muteBtn.textContent = "unmute speed tone";
  }
});

draw();
client.connect();
