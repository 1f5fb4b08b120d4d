/**
 * Incremental parser for the service's text/event-stream framing.
 *
 * The stream is a sequence of frames separated by a blank line. Data lines
 * start with "data:", comment lines (keepalive pings) with ":". A frame's
 * data lines concatenate into one JSON document.
 */

import type { ServerEvent } from "./protocol.js";

export class EventStreamParser {
  private buffer = "";

  /** Feed one chunk; returns every event completed by it, in order. */
  push(chunk: string): ServerEvent[] {
    this.buffer += chunk.replace(/\r\n/g, "\n");
    const events: ServerEvent[] = [];
    for (;;) {
      const split = this.buffer.indexOf("\n\n");
      if (split < 0) {
        break;
      }
      const frame = this.buffer.slice(0, split);
      this.buffer = this.buffer.slice(split + 2);
      const data = frame
        .split("\n")
        .filter((line) => line.startsWith("data:"))
        .map((line) => line.slice(5).replace(/^ /, ""))
        .join("\n");
      if (data) {
        events.push(JSON.parse(data) as ServerEvent);
      }
    }
    return events;
  }
}
