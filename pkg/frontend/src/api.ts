/** Search API client with stale-response suppression.
 *
 * One search is in flight per user action; when a newer search starts, any
 * response still pending from an older one is reported as stale so the view
 * never renders out-of-date results over fresh ones.
 */

import type { CorpusStats, SearchRequest } from "./types.js";

export type SearchOutcome =
  | { kind: "ok"; payload: unknown }
  | { kind: "error"; status: number; payload: unknown }
  | { kind: "stale" }
  | { kind: "network_error"; message: string };

export class SearchClient {
  private sequence = 0;

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  async search(request: SearchRequest): Promise<SearchOutcome> {
    const ticket = ++this.sequence;
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}/api/search`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(request),
      });
    } catch (err) {
      if (ticket !== this.sequence) return { kind: "stale" };
      return { kind: "network_error", message: String(err) };
    }
    const payload: unknown = await response.json().catch(() => null);
    if (ticket !== this.sequence) return { kind: "stale" };
    if (!response.ok) return { kind: "error", status: response.status, payload };
    return { kind: "ok", payload };
  }

  async corpusStats(): Promise<CorpusStats> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/corpus/stats`);
    if (!response.ok) throw new Error(`stats request failed: ${response.status}`);
    return (await response.json()) as CorpusStats;
  }
}
