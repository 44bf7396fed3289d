// @vitest-environment jsdom
import { spawn, type ChildProcess } from "node:child_process";
import { resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App, type UrlControl } from "../src/app.js";
import { serialize, type FilterState } from "../src/filter-state.js";

// vitest runs with the package root as cwd, so this stays stable under jsdom,
// where import.meta.url is not a file: URL.
const SERVER_SCRIPT = resolve(process.cwd(), "test", "parity_server.py");

let server: ChildProcess;
let base = "";

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

const VALUE_POOL = [
  "toronto",
  "iran",
  "colombo",
  "federal court",
  "section 96",
  "removal",
  "claim",
  "no-such-value",
];

function pick<T>(rng: () => number, pool: T[]): T {
  return pool[Math.floor(rng() * pool.length)];
}

function randomState(rng: () => number, slots: string[], clauseCount: number): FilterState {
  const exactBySlot = new Map<string, boolean>();
  const clauses = [];
  for (let i = 0; i < clauseCount; i++) {
    const slot = pick(rng, slots);
    if (!exactBySlot.has(slot)) exactBySlot.set(slot, rng() < 0.3);
    clauses.push({ slot, value: pick(rng, VALUE_POOL), exact: exactBySlot.get(slot)! });
  }
  return { clauses, dateFrom: "", dateTo: "", page: 1 };
}

function staticUrl(query: string): UrlControl {
  return { read: () => query, push: () => {}, onPop: () => {} };
}

async function uiTotal(query: string): Promise<number> {
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById("app")!;
  const app = new App(root, new ApiClient(base), staticUrl(query));
  await app.start();
  const banner = root.querySelector("#error-banner") as HTMLElement;
  expect(banner.hidden).toBe(true);
  const text = root.querySelector("#total-count")?.textContent ?? "";
  return Number(text.split(" ")[0]);
}

async function directTotal(query: string): Promise<number> {
  const url = query ? `${base}/cases?${query}` : `${base}/cases`;
  const response = await fetch(url);
  expect(response.ok).toBe(true);
  const body = (await response.json()) as { total: number };
  return body.total;
}

beforeAll(async () => {
  server = spawn("python3", [SERVER_SCRIPT], { stdio: ["ignore", "pipe", "pipe"] });
  const port = await new Promise<number>((resolve, reject) => {
    let seen = "";
    const timer = setTimeout(() => reject(new Error(`server not ready: ${seen}`)), 30_000);
    server.stdout!.on("data", (chunk: Buffer) => {
      seen += chunk.toString();
      const match = /READY (\d+)/.exec(seen);
      if (match) {
        clearTimeout(timer);
        resolve(Number(match[1]));
      }
    });
    server.stderr!.on("data", (chunk: Buffer) => {
      seen += chunk.toString();
    });
    server.on("exit", (code) => reject(new Error(`server exited ${code}: ${seen}`)));
  });
  base = `http://127.0.0.1:${port}`;
  // READY precedes the actual bind; wait until the service answers.
  for (let attempt = 0; ; attempt++) {
    try {
      if ((await fetch(`${base}/labels`)).ok) break;
    } catch {
      if (attempt >= 100) throw new Error("service never came up");
    }
    await new Promise((r) => setTimeout(r, 100));
  }
}, 40_000);

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("UI parity against the live service", () => {
  it("renders the same total as the API for the empty search", async () => {
    const direct = await directTotal("");
    expect(direct).toBe(3);
    expect(await uiTotal("")).toBe(direct);
  });

  it("renders the same total as the API for a contains clause", async () => {
    const query = "label.GPE=toronto";
    const direct = await directTotal(query);
    expect(direct).toBe(1);
    expect(await uiTotal(query)).toBe(direct);
  });

  it("matches the API total for random filter states", async () => {
    const labels = (await (await fetch(`${base}/labels`)).json()) as {
      slots: { slot: string }[];
    };
    const slots = labels.slots.map((row) => row.slot);
    const rng = mulberry32(20260815);
    for (let i = 0; i < 10; i++) {
      const query = serialize(randomState(rng, slots, Math.floor(rng() * 3)));
      expect(await uiTotal(query), query).toBe(await directTotal(query));
    }
  }, 30_000);

  it("never grows the UI total when a clause is added", async () => {
    const labels = (await (await fetch(`${base}/labels`)).json()) as {
      slots: { slot: string }[];
    };
    const slots = labels.slots.map((row) => row.slot);
    const rng = mulberry32(4040);
    for (let i = 0; i < 10; i++) {
      const broad = randomState(rng, slots, Math.floor(rng() * 2));
      const slot = pick(rng, slots);
      const narrowed: FilterState = {
        ...broad,
        clauses: [
          ...broad.clauses,
          { slot, value: pick(rng, VALUE_POOL), exact: false },
        ],
      };
      const broadTotal = await uiTotal(serialize(broad));
      const narrowTotal = await uiTotal(serialize(narrowed));
      expect(narrowTotal, serialize(narrowed)).toBeLessThanOrEqual(broadTotal);
    }
  }, 30_000);

  it("keeps every rendered highlight inside its text", async () => {
    const listing = (await (await fetch(`${base}/cases?page_size=100`)).json()) as {
      results: { case_id: string }[];
    };
    expect(listing.results.length).toBeGreaterThan(0);
    for (const row of listing.results) {
      document.body.innerHTML = '<div id="app"></div>';
      const root = document.getElementById("app")!;
      const app = new App(root, new ApiClient(base), staticUrl(""));
      await app.start();
      await app.openCase(row.case_id);

      const detail = (await (await fetch(`${base}/cases/${row.case_id}`)).json()) as {
        cover: { text: string; spans: unknown[] } | null;
        sentences: { text: string; spans: { start: number; end: number }[] }[];
      };

      const paragraphs = [...root.querySelectorAll(".case-detail .sentence")];
      expect(paragraphs).toHaveLength(detail.sentences.length);
      detail.sentences.forEach((sentence, idx) => {
        const para = paragraphs[idx];
        // Reassembled text equal to the source proves no mark spills past it.
        expect(para.textContent).toBe(sentence.text);
        const marks = [...para.querySelectorAll("mark")];
        expect(marks).toHaveLength(sentence.spans.length);
        marks.forEach((mark, spanIdx) => {
          const span = sentence.spans[spanIdx];
          expect(span.start).toBeGreaterThanOrEqual(0);
          expect(span.end).toBeLessThanOrEqual(sentence.text.length);
          expect(mark.textContent).toBe(sentence.text.slice(span.start, span.end));
        });
      });
      if (detail.cover) {
        expect(root.querySelector(".cover-text")?.textContent).toBe(detail.cover.text);
      }
    }
  }, 30_000);
});
