/** Newline-delimited JSON stream reader with seq dedup and resume.
 *
 * The service tags every push message with the log seq that produced it and
 * replays history from `?last_seq=`; delivery is at-least-once, so the reader
 * drops anything at or below the highest seq it has already handed out and
 * reconnects from that point after a drop.
 */

import type { StreamMessage } from "./types.js";
import type { FetchLike } from "./client.js";

export interface StreamOptions {
  lastSeq?: number;
  fetchImpl?: FetchLike;
  /** reconnect back-off in ms; 0 disables reconnection (single pass) */
  retryMs?: number;
  headers?: Record<string, string>;
}

export class StreamConnection {
  private stopped = false;
  lastSeq: number;

  constructor(
    private url: (lastSeq: number) => string,
    private onMessage: (message: StreamMessage) => void,
    private options: StreamOptions = {},
  ) {
    this.lastSeq = options.lastSeq ?? 0;
  }

  close(): void {
    this.stopped = true;
  }

  async run(): Promise<void> {
    const fetchImpl = this.options.fetchImpl ?? ((url: string, init?: RequestInit) => fetch(url, init));
    const retryMs = this.options.retryMs ?? 1000;
    for (;;) {
      if (this.stopped) return;
      try {
        const response = await fetchImpl(this.url(this.lastSeq),
          { headers: this.options.headers });
        if (!response.ok || !response.body) throw new Error(`stream HTTP ${response.status}`);
        const reader = response.body.getReader();
        const decoder = new TextDecoder();
        let buffer = "";
        for (;;) {
          if (this.stopped) {
            await reader.cancel().catch(() => undefined);
            return;
          }
          const { done, value } = await reader.read();
          if (done) break;
          buffer += decoder.decode(value, { stream: true });
          let newline;
          while ((newline = buffer.indexOf("\n")) >= 0) {
            const line = buffer.slice(0, newline);
            buffer = buffer.slice(newline + 1);
            if (!line.trim()) continue;
            const message = JSON.parse(line) as StreamMessage;
            if (message.kind === "heartbeat") continue;
            if (message.seq <= this.lastSeq) continue; // at-least-once dedup
            this.lastSeq = message.seq;
            this.onMessage(message);
          }
        }
      } catch {
        // fall through to reconnect
      }
      if (!retryMs || this.stopped) return;
      await new Promise((resolve) => setTimeout(resolve, retryMs));
    }
  }
}

export function openStream(
  url: (lastSeq: number) => string,
  onMessage: (message: StreamMessage) => void,
  options: StreamOptions = {},
): StreamConnection {
  const connection = new StreamConnection(url, onMessage, options);
  void connection.run();
  return connection;
}
