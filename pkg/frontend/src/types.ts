/** Shapes of the payloads exchanged with the simulator and location server. */

export interface TagMarker {
  id: string;
  x: number;
  y: number;
}

export interface SimState {
  t: number;
  user: { x: number; y: number };
  tags: TagMarker[];
  client_phase: string;
  location: LocationRecord | null;
}

export interface LocationRecord {
  tag: string;
  name: string;
  description: string;
  image: string | null;
  extras: Record<string, string>;
}

export type SteerCommand =
  | { cmd: "vel"; vx: number; vy: number }
  | { cmd: "goto"; x: number; y: number }
  | { cmd: "stop" };
