/** Incremental server-sent-events parser and a reconnecting progress
 * subscription. The server replays the full event history on reconnect;
 * the chart fold deduplicates by iteration, so replay is harmless. */

import type { ApiClient } from './api';
import type { ProgressEvent } from './types';

export interface SseEvent {
  type: string; // 'message' unless the server named the event
  data: string;
}

/** Feed arbitrary chunks; complete events come out. Handles events split
 * across chunk boundaries. */
export class SseParser {
  private buffer = '';
  private eventType = 'message';
  private dataLines: string[] = [];

  feed(chunk: string): SseEvent[] {
    this.buffer += chunk;
    const out: SseEvent[] = [];
    for (;;) {
      const nl = this.buffer.indexOf('\n');
      if (nl < 0) break;
      const line = this.buffer.slice(0, nl).replace(/\r$/, '');
      this.buffer = this.buffer.slice(nl + 1);
      if (line === '') {
        if (this.dataLines.length > 0) {
          out.push({ type: this.eventType, data: this.dataLines.join('\n') });
        }
        this.eventType = 'message';
        this.dataLines = [];
      } else if (line.startsWith('event:')) {
        this.eventType = line.slice(6).trim();
      } else if (line.startsWith('data:')) {
        this.dataLines.push(line.slice(5).trimStart());
      }
      // comments and unknown fields are ignored per the SSE spec
    }
    return out;
  }
}

export interface ProgressSubscription {
  done: Promise<void>;
  close(): void;
}

/** Subscribe to a job's progress stream, reconnecting (with replay) on
 * drops until the server sends the explicit end event. */
export function subscribeProgress(
  client: ApiClient,
  jobId: string,
  onEvent: (event: ProgressEvent) => void,
  retryMs = 1000,
): ProgressSubscription {
  let closed = false;

  const done = (async () => {
    while (!closed) {
      try {
        const res = await client.openProgress(jobId);
        if (!res.ok || !res.body) throw new Error(`progress: HTTP ${res.status}`);
        const parser = new SseParser();
        const reader = res.body.getReader();
        const decoder = new TextDecoder();
        for (;;) {
          const { value, done: eof } = await reader.read();
          if (eof) break;
          for (const ev of parser.feed(decoder.decode(value, { stream: true }))) {
            if (ev.type === 'end') return;
            if (closed) return;
            onEvent(JSON.parse(ev.data) as ProgressEvent);
          }
        }
        // stream dropped without the end sentinel: reconnect and replay
      } catch {
        // connection error: fall through to retry
      }
      if (!closed) await new Promise((r) => setTimeout(r, retryMs));
    }
  })();

  return {
    done,
    close() {
      closed = true;
    },
  };
}
