import { describe, expect, it } from "vitest";

import { labelColor, segment } from "../src/highlight.js";
import type { Span } from "../src/types.js";

function concat(segments: { text: string }[]): string {
  return segments.map((s) => s.text).join("");
}

describe("span segmentation", () => {
  it("splits text around labeled spans", () => {
    const text = "the claimant arrived in toronto with a passport";
    const spans: Span[] = [
      { start: 24, end: 31, label: "GPE" },
      { start: 39, end: 47, label: "DOC_EVIDENCE" },
    ];
    expect(segment(text, spans)).toEqual([
      { text: "the claimant arrived in ", label: null },
      { text: "toronto", label: "GPE" },
      { text: " with a ", label: null },
      { text: "passport", label: "DOC_EVIDENCE" },
    ]);
  });

  it("always reassembles to the original text", () => {
    const text = "abcdefghij";
    const cases: Span[][] = [
      [],
      [{ start: 0, end: 10, label: "X" }],
      [{ start: 3, end: 5, label: "X" }, { start: 5, end: 8, label: "Y" }],
    ];
    for (const spans of cases) {
      expect(concat(segment(text, spans))).toBe(text);
    }
  });

  it("drops out-of-bounds and overlapping spans instead of rendering them", () => {
    const text = "short text";
    const spans: Span[] = [
      { start: -2, end: 4, label: "BAD" },
      { start: 4, end: 99, label: "BAD" },
      { start: 6, end: 6, label: "BAD" },
      { start: 0, end: 5, label: "KEPT" },
      { start: 3, end: 8, label: "OVERLAP" },
      { start: 2.5, end: 6, label: "BAD" },
    ];
    const segments = segment(text, spans);
    expect(concat(segments)).toBe(text);
    const labels = segments.filter((s) => s.label !== null).map((s) => s.label);
    expect(labels).toEqual(["KEPT"]);
  });

  it("holds the bounds invariant under fuzzed spans", () => {
    let seed = 7;
    const rand = (n: number) => {
      seed = (seed * 1103515245 + 12345) % 2147483648;
      return seed % n;
    };
    for (let i = 0; i < 200; i++) {
      const text = "x".repeat(rand(40));
      const spans: Span[] = [];
      for (let j = 0; j < rand(6); j++) {
        spans.push({
          start: rand(60) - 10,
          end: rand(60) - 10,
          label: `L${j}`,
        });
      }
      const segments = segment(text, spans);
      expect(concat(segments)).toBe(text);
      let cursor = 0;
      for (const piece of segments) {
        const end = cursor + piece.text.length;
        expect(end).toBeLessThanOrEqual(text.length);
        cursor = end;
      }
    }
  });

  it("returns a single plain segment for empty or unlabeled text", () => {
    expect(segment("", [])).toEqual([{ text: "", label: null }]);
    expect(segment("plain", [])).toEqual([{ text: "plain", label: null }]);
  });
});

describe("label colors", () => {
  it("is deterministic and css-ready", () => {
    expect(labelColor("GPE")).toBe(labelColor("GPE"));
    expect(labelColor("GPE")).toMatch(/^hsl\(\d+, 70%, 85%\)$/);
    expect(labelColor("GPE")).not.toBe(labelColor("DOC_EVIDENCE"));
  });
});
