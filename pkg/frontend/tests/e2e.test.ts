/**
 * Scripted end-to-end run against the real engine service with stub model
 * backends: build a corpus store and dense index with the engine CLI, start
 * `crossqa serve`, then drive a search through the API client and render the
 * response. Asserts the card count, the red single-answer highlight, distinct
 * multi-answer colors, and the fallback banner for an impossible date range.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { SearchClient } from "../src/api.js";
import { renderResults } from "../src/render.js";
import { stateToRequest, DEFAULT_STATE } from "../src/state.js";
import { isSearchResponse } from "../src/types.js";

const PORT = 8899;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;
let workdir = "";

// A body where the question's tokens appear twice, far enough apart for two
// non-overlapping extraction windows (the stub reader uses 20-token windows).
const padding = Array.from({ length: 40 }, (_, i) => `pad${i}`).join(" ");
const multiAnswerBody =
  `fever treatment with rest works well. ${padding}. ` +
  "later fever treatment with fluids also works.";

const corpus = [
  { id: "doc-multi", title: "Fever treatments", text: multiAnswerBody, lang: "en", date: "2021-02-01" },
  { id: "doc-single", title: "Vaccine outcomes", text: "the vaccine reduced severe outcomes in adults.", lang: "en", date: "2021-06-15" },
  { id: "doc-other", title: "Transmission", text: "droplet spread dominates indoor transmission.", lang: "en", date: "2020-12-01" },
  { id: "doc-es", title: "Estudio", text: "resultados sobre fiebre en adultos mayores.", lang: "es", date: "2021-09-01" },
];

async function waitForHealth(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE}/api/health`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 300));
  }
  throw new Error("engine service did not become healthy in time");
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "crossqa-ui-e2e-"));
  const corpusPath = join(workdir, "corpus.jsonl");
  writeFileSync(corpusPath, corpus.map((r) => JSON.stringify(r)).join("\n") + "\n");

  const ingest = spawnSync("crossqa", ["ingest", "--corpus", corpusPath, "--out", join(workdir, "store")]);
  if (ingest.status !== 0) throw new Error(`ingest failed: ${ingest.stderr}`);
  const build = spawnSync("crossqa", [
    "index", "build", "--store", join(workdir, "store"), "--out", join(workdir, "dense.xqai"),
  ]);
  if (build.status !== 0) throw new Error(`index build failed: ${build.stderr}`);

  server = spawn("crossqa", [
    "serve",
    "--store", join(workdir, "store"),
    "--dense-index", join(workdir, "dense.xqai"),
    "--port", String(PORT),
  ], { stdio: "ignore" });
  await waitForHealth(30_000);
}, 60_000);

afterAll(() => {
  server?.kill();
  if (workdir) rmSync(workdir, { recursive: true, force: true });
});

describe("scripted search against the live service", () => {
  it("renders k cards for a plain search", async () => {
    const client = new SearchClient(BASE);
    const built = stateToRequest({ ...DEFAULT_STATE, query: "vaccine reduced severe outcomes", numArticles: 3 });
    if (!built.ok) throw new Error(built.message);
    const outcome = await client.search(built.request);
    expect(outcome.kind).toBe("ok");
    if (outcome.kind !== "ok") return;
    expect(isSearchResponse(outcome.payload)).toBe(true);
    const html = renderResults(outcome.payload);
    expect(html.match(/class="result-card"/g)).toHaveLength(3);
  });

  it("highlights the single answer in red", async () => {
    const client = new SearchClient(BASE);
    const outcome = await client.search({ query: "vaccine reduced severe outcomes", k: 1 });
    if (outcome.kind !== "ok") throw new Error(`unexpected outcome ${outcome.kind}`);
    const payload = outcome.payload as { results: Array<{ doc_id: string; spans: unknown[]; highlight_colors: number[] }> };
    const top = payload.results[0];
    expect(top?.doc_id).toBe("doc-single");
    expect(top?.spans).toHaveLength(1);
    expect(top?.highlight_colors).toEqual([0]);
    const html = renderResults(outcome.payload);
    expect(html).toContain("hl-red");
  });

  it("gives multiple answers distinct colors", async () => {
    const client = new SearchClient(BASE);
    const outcome = await client.search({ query: "fever treatment works", k: 1 });
    if (outcome.kind !== "ok") throw new Error(`unexpected outcome ${outcome.kind}`);
    const payload = outcome.payload as { results: Array<{ doc_id: string; spans: unknown[]; highlight_colors: number[] }> };
    const top = payload.results[0];
    expect(top?.doc_id).toBe("doc-multi");
    expect((top?.spans.length ?? 0) >= 2).toBe(true);
    expect(new Set(top?.highlight_colors).size).toBe(top?.highlight_colors.length);
    const html = renderResults(outcome.payload);
    expect(html).toContain("hl-red");
    expect(html).toContain("hl-blue");
  });

  it("shows the fallback banner when the date range excludes everything", async () => {
    const client = new SearchClient(BASE);
    const outcome = await client.search({
      query: "fever treatment",
      k: 2,
      date_from: "1990-01-01",
      date_to: "1990-12-31",
    });
    if (outcome.kind !== "ok") throw new Error(`unexpected outcome ${outcome.kind}`);
    const html = renderResults(outcome.payload);
    expect(html).toContain("fallback-banner");
    expect(html.match(/class="result-card"/g)).toHaveLength(2);
  });

  it("populates sidebar languages from live corpus stats", async () => {
    const client = new SearchClient(BASE);
    const stats = await client.corpusStats();
    expect(stats.per_lang).toHaveProperty("en");
    expect(stats.per_lang).toHaveProperty("es");
  });

  it("suppresses stale responses when a newer search starts", async () => {
    // Deterministic interleaving with a controllable fetch stub.
    const resolvers: Array<(value: Response) => void> = [];
    const fakeFetch = (() =>
      new Promise<Response>((resolve) => {
        resolvers.push(resolve);
      })) as unknown as typeof fetch;
    const client = new SearchClient(BASE, fakeFetch);
    const first = client.search({ query: "old", k: 1 });
    const second = client.search({ query: "new", k: 1 });
    const ok = new Response(JSON.stringify({ schema_version: 1, results: [], fallback_used: false, timing_ms: 0 }), {
      status: 200,
      headers: { "content-type": "application/json" },
    });
    resolvers[1]?.(ok.clone());
    resolvers[0]?.(ok.clone());
    expect((await first).kind).toBe("stale");
    expect((await second).kind).toBe("ok");
  });
});
