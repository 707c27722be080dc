/** Maps user gestures (arrow keys, map clicks) to steer command payloads. */

import type { SteerCommand } from "./types.js";

export const WALK_SPEED = 1.0; // m/s, fixed arrow-key speed

const KEY_VECTORS: Record<string, [number, number]> = {
  ArrowRight: [1, 0],
  ArrowLeft: [-1, 0],
  ArrowUp: [0, 1],
  ArrowDown: [0, -1],
};

/** Held arrow keys combine into one velocity; none held means stop. */
export function velocityFromKeys(held: Set<string>): SteerCommand {
  let vx = 0;
  let vy = 0;
  for (const key of held) {
    const vec = KEY_VECTORS[key];
    if (vec) {
      vx += vec[0] * WALK_SPEED;
      vy += vec[1] * WALK_SPEED;
    }
  }
  if (vx === 0 && vy === 0) {
    return { cmd: "stop" };
  }
  return { cmd: "vel", vx, vy };
}

export function isSteerKey(key: string): boolean {
  return key in KEY_VECTORS;
}

export function gotoFromClick(x: number, y: number): SteerCommand {
  return { cmd: "goto", x, y };
}

/** Pixel-space canvas coordinates to world meters. */
export interface MapViewport {
  width: number;
  height: number;
  worldMinX: number;
  worldMaxX: number;
  worldMinY: number;
  worldMaxY: number;
}

export function canvasToWorld(
  viewport: MapViewport,
  px: number,
  py: number,
): { x: number; y: number } {
  const sx = (viewport.worldMaxX - viewport.worldMinX) / viewport.width;
  const sy = (viewport.worldMaxY - viewport.worldMinY) / viewport.height;
  // canvas y grows downward, world y grows upward
  return {
    x: viewport.worldMinX + px * sx,
    y: viewport.worldMaxY - py * sy,
  };
}

export function worldToCanvas(
  viewport: MapViewport,
  x: number,
  y: number,
): { px: number; py: number } {
  const sx = viewport.width / (viewport.worldMaxX - viewport.worldMinX);
  const sy = viewport.height / (viewport.worldMaxY - viewport.worldMinY);
  return {
    px: (x - viewport.worldMinX) * sx,
    py: (viewport.worldMaxY - y) * sy,
  };
}
