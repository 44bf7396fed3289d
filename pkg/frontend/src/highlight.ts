import type { Span } from "./types.js";

export type Segment = { text: string; label: string | null };

// Split text into plain and labeled segments. Spans outside the text or
// overlapping an earlier span are dropped, so every labeled segment is
// guaranteed to lie within bounds and the segments concatenate back to
// the original text.
export function segment(text: string, spans: Span[]): Segment[] {
  const usable = spans
    .filter(
      (s) =>
        Number.isInteger(s.start) &&
        Number.isInteger(s.end) &&
        s.start >= 0 &&
        s.start < s.end &&
        s.end <= text.length,
    )
    .sort((a, b) => a.start - b.start || a.end - b.end);
  const out: Segment[] = [];
  let cursor = 0;
  for (const span of usable) {
    if (span.start < cursor) continue;
    if (span.start > cursor) {
      out.push({ text: text.slice(cursor, span.start), label: null });
    }
    out.push({ text: text.slice(span.start, span.end), label: span.label });
    cursor = span.end;
  }
  if (cursor < text.length || out.length === 0) {
    out.push({ text: text.slice(cursor), label: null });
  }
  return out;
}

// Stable per-slot color so the legend and the marks always agree.
export function labelColor(label: string): string {
  let hash = 0;
  for (let i = 0; i < label.length; i++) {
    hash = (hash * 31 + label.charCodeAt(i)) >>> 0;
  }
  return `hsl(${hash % 360}, 70%, 85%)`;
}
