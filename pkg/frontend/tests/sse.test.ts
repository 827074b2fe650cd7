import { describe, expect, it } from "vitest";

import { SseParser, readSseStream } from "../src/sse.js";
import type { StreamEvent } from "../src/types.js";
import { sseBody } from "./helpers.js";

describe("SseParser", () => {
  it("parses a complete frame", () => {
    const events = new SseParser().push('event: delta\ndata: {"label":"m","text":"hi"}\n\n');
    expect(events).toEqual([{ event: "delta", data: { label: "m", text: "hi" } }]);
  });

  it("buffers across chunk boundaries", () => {
    const parser = new SseParser();
    expect(parser.push("event: del")).toEqual([]);
    expect(parser.push('ta\ndata: {"x":')).toEqual([]);
    const events = parser.push("1}\n\nevent: done\n");
    expect(events).toEqual([{ event: "delta", data: { x: 1 } }]);
    expect(parser.push("data: {}\n\n")).toEqual([{ event: "done", data: {} }]);
  });

  it("aggregates every event in a stream, not only the first", async () => {
    const frames: Array<[string, unknown]> = [
      ["delta", { label: "a", text: "one" }],
      ["delta", { label: "a", text: "two" }],
      ["compile", { label: "a", status: "Success" }],
      ["done", { paths: [] }],
    ];
    const seen: StreamEvent[] = [];
    await readSseStream(sseBody(frames, 7), (event) => seen.push(event));
    expect(seen.map((e) => e.event)).toEqual(["delta", "delta", "compile", "done"]);
    expect(seen[1].data.text).toBe("two");
  });

  it("handles CRLF newlines", () => {
    const events = new SseParser().push('event: done\r\ndata: {"ok":true}\r\n\r\n');
    expect(events).toEqual([{ event: "done", data: { ok: true } }]);
  });

  it("wraps non-JSON payloads instead of throwing", () => {
    const events = new SseParser().push("event: delta\ndata: not json\n\n");
    expect(events[0].data).toEqual({ raw: "not json" });
  });
});
