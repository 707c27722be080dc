/** DOM wiring: floor-plan canvas, location panel, login form, steering. */

import { fetchInfo, login, postReset, postSteer } from "./api.js";
import {
  canvasToWorld,
  gotoFromClick,
  isSteerKey,
  MapViewport,
  velocityFromKeys,
  worldToCanvas,
} from "./steer.js";
import { StateStream } from "./sse.js";
import type { SimState } from "./types.js";
import {
  applyDisconnect,
  applyInfo,
  applySimState,
  initialViewModel,
  ViewModel,
} from "./view.js";

const canvas = document.getElementById("map") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const banner = document.getElementById("banner")!;
const phaseEl = document.getElementById("phase")!;
const nameEl = document.getElementById("location-name")!;
const descEl = document.getElementById("location-desc")!;
const imageEl = document.getElementById("location-image") as HTMLImageElement;
const topicsEl = document.getElementById("topics")!;
const infoEl = document.getElementById("info-text")!;
const clockEl = document.getElementById("clock")!;
const loginForm = document.getElementById("login-form") as HTMLFormElement;
const loginStatus = document.getElementById("login-status")!;
const resetButton = document.getElementById("reset")!;

let vm: ViewModel = initialViewModel;
let sessionToken: string | null = null;
let currentTag: string | null = null;
const heldKeys = new Set<string>();

const viewport: MapViewport = {
  width: canvas.width,
  height: canvas.height,
  worldMinX: -1,
  worldMaxX: 9,
  worldMinY: -4,
  worldMaxY: 4,
};

function render(): void {
  banner.classList.toggle("hidden", vm.connected);
  clockEl.textContent = `t = ${vm.clock.toFixed(2)} s`;
  phaseEl.textContent = vm.phase;
  nameEl.textContent = vm.locationName;
  descEl.textContent = vm.description;
  if (vm.imageUrl && sessionToken) {
    // images need the session header, so fetch as a blob
    fetch(vm.imageUrl, { headers: { "X-Session": sessionToken } })
      .then((r) => (r.ok ? r.blob() : null))
      .then((blob) => {
        if (blob) {
          imageEl.src = URL.createObjectURL(blob);
          imageEl.classList.remove("hidden");
        }
      })
      .catch(() => undefined);
  } else {
    imageEl.classList.add("hidden");
  }
  renderTopics();
  infoEl.textContent = vm.infoText ?? "";
  renderMap();
}

function renderTopics(): void {
  topicsEl.innerHTML = "";
  for (const topic of vm.topics) {
    const button = document.createElement("button");
    button.textContent = `more info: ${topic}`;
    button.addEventListener("click", () => requestInfo(topic));
    topicsEl.appendChild(button);
  }
}

async function requestInfo(topic: string): Promise<void> {
  if (!sessionToken || !currentTag) {
    return;
  }
  try {
    const text = await fetchInfo(sessionToken, currentTag, topic);
    vm = applyInfo(vm, text);
  } catch {
    vm = applyInfo(vm, null);
  }
  render();
}

function renderMap(): void {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#ccc";
  ctx.strokeRect(0, 0, canvas.width, canvas.height);
  for (const tag of vm.tags) {
    const { px, py } = worldToCanvas(viewport, tag.x, tag.y);
    ctx.fillStyle = "#2a6";
    ctx.beginPath();
    ctx.arc(px, py, 6, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = "#333";
    ctx.font = "10px monospace";
    ctx.fillText(tag.id, px + 8, py - 8);
  }
  const user = worldToCanvas(viewport, vm.user.x, vm.user.y);
  ctx.fillStyle = "#06c";
  ctx.beginPath();
  ctx.arc(user.px, user.py, 8, 0, 2 * Math.PI);
  ctx.fill();
}

function onSimState(state: SimState): void {
  vm = applySimState(vm, state);
  currentTag = state.location ? state.location.tag : currentTag;
  render();
}

// -- steering -------------------------------------------------------------

document.addEventListener("keydown", (e) => {
  if (!isSteerKey(e.key) || heldKeys.has(e.key)) {
    return;
  }
  e.preventDefault();
  heldKeys.add(e.key);
  postSteer(velocityFromKeys(heldKeys)).catch(showToast);
});

document.addEventListener("keyup", (e) => {
  if (!isSteerKey(e.key)) {
    return;
  }
  heldKeys.delete(e.key);
  postSteer(velocityFromKeys(heldKeys)).catch(showToast);
});

canvas.addEventListener("click", (e) => {
  const rect = canvas.getBoundingClientRect();
  const { x, y } = canvasToWorld(viewport, e.clientX - rect.left, e.clientY - rect.top);
  postSteer(gotoFromClick(x, y)).catch(showToast);
});

resetButton.addEventListener("click", () => {
  postReset().catch(showToast);
});

function showToast(err: unknown): void {
  const toast = document.getElementById("toast")!;
  toast.textContent = String(err);
  toast.classList.remove("hidden");
  setTimeout(() => toast.classList.add("hidden"), 3000);
}

// -- login ----------------------------------------------------------------

loginForm.addEventListener("submit", async (e) => {
  e.preventDefault();
  const data = new FormData(loginForm);
  const token = await login(String(data.get("username")), String(data.get("password")));
  if (token) {
    sessionToken = token;
    loginStatus.textContent = "logged in";
  } else {
    loginStatus.textContent = "login failed";
  }
});

// -- live state -----------------------------------------------------------

const stream = new StateStream("/sim/events", {
  onState: onSimState,
  onConnect: () => {
    vm = { ...vm, connected: true };
    render();
  },
  onDisconnect: () => {
    vm = applyDisconnect(vm);
    render();
  },
});
stream.start();
render();
