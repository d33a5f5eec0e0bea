import { describe, expect, it } from "vitest";

import { StreamConnection } from "../src/api/stream.js";
import type { StreamMessage } from "../src/api/types.js";

function ndjsonResponse(lines: object[]): Response {
  return new Response(lines.map((line) => JSON.stringify(line)).join("\n") + "\n", {
    status: 200,
    headers: { "Content-Type": "application/x-ndjson" },
  });
}

describe("stream connection", () => {
  it("delivers messages in order and skips heartbeats", async () => {
    const got: StreamMessage[] = [];
    const connection = new StreamConnection(
      () => "http://svc/stream",
      (message) => got.push(message),
      {
        retryMs: 0,
        fetchImpl: async () => ndjsonResponse([
          { seq: 1, kind: "a", data: {} },
          { kind: "heartbeat", seq: 1 },
          { seq: 2, kind: "b", data: {} },
        ]),
      },
    );
    await connection.run();
    expect(got.map((m) => [m.seq, m.kind])).toEqual([[1, "a"], [2, "b"]]);
  });

  it("dedups at-least-once redelivery by seq", async () => {
    const got: number[] = [];
    const connection = new StreamConnection(
      () => "http://svc/stream",
      (message) => got.push(message.seq),
      {
        retryMs: 0,
        fetchImpl: async () => ndjsonResponse([
          { seq: 3, kind: "a", data: {} },
          { seq: 3, kind: "a", data: {} },
          { seq: 4, kind: "b", data: {} },
          { seq: 2, kind: "stale", data: {} },
        ]),
      },
    );
    await connection.run();
    expect(got).toEqual([3, 4]);
  });

  it("reconnects from the last seen seq", async () => {
    const urls: string[] = [];
    let call = 0;
    const got: number[] = [];
    const connection = new StreamConnection(
      (lastSeq) => `http://svc/stream?last_seq=${lastSeq}`,
      (message) => {
        got.push(message.seq);
        if (message.seq >= 6) connection.close();
      },
      {
        retryMs: 1,
        fetchImpl: async (url) => {
          urls.push(url);
          call += 1;
          if (call === 1) return ndjsonResponse([{ seq: 5, kind: "a", data: {} }]);
          return ndjsonResponse([{ seq: 6, kind: "b", data: {} }]);
        },
      },
    );
    await connection.run();
    expect(got).toEqual([5, 6]);
    expect(urls[0]).toContain("last_seq=0");
    expect(urls[1]).toContain("last_seq=5");
  });

  it("honours an initial resume point", async () => {
    const urls: string[] = [];
    const connection = new StreamConnection(
      (lastSeq) => `http://svc/stream?last_seq=${lastSeq}`,
      () => undefined,
      {
        lastSeq: 41,
        retryMs: 0,
        fetchImpl: async (url) => {
          urls.push(url);
          return ndjsonResponse([]);
        },
      },
    );
    await connection.run();
    expect(urls[0]).toContain("last_seq=41");
  });
});
