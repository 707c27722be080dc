/**
 * Subscription to GET /sim/events with automatic reconnect. The browser's
 * EventSource already retries, but we surface connection state so the UI
 * can show a disconnected banner, and back off manually if the source
 * errors out completely.
 */

import type { SimState } from "./types.js";

export interface StateStreamHandlers {
  onState: (state: SimState) => void;
  onConnect: () => void;
  onDisconnect: () => void;
}

const INITIAL_BACKOFF_MS = 500;
const MAX_BACKOFF_MS = 8000;

export class StateStream {
  private source: EventSource | null = null;
  private backoffMs = INITIAL_BACKOFF_MS;
  private stopped = false;

  constructor(
    private readonly url: string,
    private readonly handlers: StateStreamHandlers,
  ) {}

  start(): void {
    this.stopped = false;
    this.connect();
  }

  stop(): void {
    this.stopped = true;
    this.source?.close();
    this.source = null;
  }

  private connect(): void {
    this.source = new EventSource(this.url);
    this.source.onopen = () => {
      this.backoffMs = INITIAL_BACKOFF_MS;
      this.handlers.onConnect();
    };
    this.source.onmessage = (msg: MessageEvent<string>) => {
      this.handlers.onState(JSON.parse(msg.data) as SimState);
    };
    this.source.onerror = () => {
      this.handlers.onDisconnect();
      this.source?.close();
      this.source = null;
      if (!this.stopped) {
        setTimeout(() => this.connect(), this.backoffMs);
        this.backoffMs = Math.min(this.backoffMs * 2, MAX_BACKOFF_MS);
      }
    };
  }
}
