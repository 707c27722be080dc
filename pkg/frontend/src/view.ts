/**
 * Pure view-model reducer. Every displayed fact derives from the last sim
 * event payload plus the last /info response; there is no hidden UI state,
 * so a Lost/Unknown transition can never leave stale location data behind.
 */

import type { LocationRecord, SimState } from "./types.js";

export interface ViewModel {
  connected: boolean;
  clock: number;
  user: { x: number; y: number };
  tags: { id: string; x: number; y: number }[];
  phase: string;
  locationName: string;
  description: string;
  imageUrl: string | null;
  topics: string[];
  infoText: string | null;
}

export const initialViewModel: ViewModel = {
  connected: false,
  clock: 0,
  user: { x: 0, y: 0 },
  tags: [],
  phase: "logged_out",
  locationName: "Unknown location",
  description: "",
  imageUrl: null,
  topics: [],
  infoText: null,
};

export function applySimState(vm: ViewModel, state: SimState): ViewModel {
  const record: LocationRecord | null =
    state.client_phase === "located" ? state.location : null;
  return {
    ...vm,
    connected: true,
    clock: state.t,
    user: state.user,
    tags: state.tags,
    phase: state.client_phase,
    locationName: record ? record.name : "Unknown location",
    description: record ? record.description : "",
    imageUrl: record && record.image ? `/image/${record.image}` : null,
    topics: record ? Object.keys(record.extras) : [],
    // drop any fetched info once the record it belonged to is gone
    infoText: record ? vm.infoText : null,
  };
}

export function applyInfo(vm: ViewModel, text: string | null): ViewModel {
  return { ...vm, infoText: text ?? "no further information" };
}

export function applyDisconnect(vm: ViewModel): ViewModel {
  return { ...vm, connected: false };
}
