/** Thin wrappers over the simulator control and location-server HTTP APIs. */

import type { SteerCommand } from "./types.js";

export async function postSteer(command: SteerCommand): Promise<void> {
  const resp = await fetch("/sim/steer", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(command),
  });
  if (!resp.ok) {
    throw new Error(`steer failed: ${resp.status}`);
  }
}

export async function postReset(): Promise<void> {
  await fetch("/sim/reset", { method: "POST" });
}

export async function login(username: string, password: string): Promise<string | null> {
  const resp = await fetch("/login", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ username, password }),
  });
  if (!resp.ok) {
    return null;
  }
  const body = (await resp.json()) as { token: string };
  return body.token;
}

/** Returns the topic text, or null on 404 ("no further information"). */
export async function fetchInfo(
  token: string,
  tag: string,
  topic: string,
): Promise<string | null> {
  const params = new URLSearchParams({ tag, topic });
  const resp = await fetch(`/info?${params}`, { headers: { "X-Session": token } });
  if (resp.status === 404) {
    return null;
  }
  if (!resp.ok) {
    throw new Error(`info failed: ${resp.status}`);
  }
  const body = (await resp.json()) as { text: string };
  return body.text;
}
