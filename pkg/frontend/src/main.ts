/** DOM wiring: sidebar options, search bar, results pane. */

import { SearchClient } from "./api.js";
import { renderLanguageOptions, renderResults } from "./render.js";
import { DEFAULT_STATE, stateToRequest, type UiState } from "./state.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function initApp(): void {
  const client = new SearchClient();
  const state: UiState = { ...DEFAULT_STATE, langs: [] };

  const resultsPane = el<HTMLDivElement>("results-pane");
  const statusLine = el<HTMLParagraphElement>("status-line");
  const langsBox = el<HTMLDivElement>("lang-options");

  client
    .corpusStats()
    .then((stats) => {
      langsBox.innerHTML = renderLanguageOptions(stats, state.langs);
    })
    .catch(() => {
      langsBox.innerHTML = '<p class="lang-error">Language list unavailable.</p>';
    });

  async function runSearch(): Promise<void> {
    state.query = el<HTMLInputElement>("search-input").value;
    state.numArticles = Number(el<HTMLInputElement>("num-articles").value) || 3;
    state.langs = Array.from(
      langsBox.querySelectorAll<HTMLInputElement>("input[name=lang]:checked"),
    ).map((box) => box.value);
    state.dateFrom = el<HTMLInputElement>("date-from").value || null;
    state.dateTo = el<HTMLInputElement>("date-to").value || null;

    const built = stateToRequest(state);
    if (!built.ok) {
      statusLine.textContent = built.message;
      return;
    }
    statusLine.textContent = "Searching...";
    const outcome = await client.search(built.request);
    switch (outcome.kind) {
      case "stale":
        return; // a newer search owns the pane
      case "network_error":
        statusLine.textContent = "Search service unreachable.";
        return;
      case "error": {
        const payload = outcome.payload as { error?: { message?: string } } | null;
        statusLine.textContent = payload?.error?.message ?? `Request failed (${outcome.status}).`;
        return;
      }
      case "ok":
        statusLine.textContent = "";
        resultsPane.innerHTML = renderResults(outcome.payload, state.expandedIds);
    }
  }

  el<HTMLButtonElement>("search-button").addEventListener("click", () => void runSearch());
  el<HTMLInputElement>("search-input").addEventListener("keydown", (event) => {
    if (event.key === "Enter") void runSearch();
  });
}

if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", initApp);
}
