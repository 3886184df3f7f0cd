/** Sidebar + search state and its faithful mapping onto a search request. */

import type { SearchRequest } from "./types.js";

export interface UiState {
  query: string;
  numArticles: number;
  /** Selected language codes; empty means "all languages". */
  langs: string[];
  dateFrom: string | null;
  dateTo: string | null;
  expandedIds: string[];
}

export const DEFAULT_STATE: UiState = {
  query: "",
  numArticles: 3,
  langs: [],
  dateFrom: null,
  dateTo: null,
  expandedIds: [],
};

export type RequestOrError =
  | { ok: true; request: SearchRequest }
  | { ok: false; message: string };

const ISO_DATE = /^\d{4}-\d{2}-\d{2}$/;

/**
 * Build the request for the current state. Unset filters are omitted rather
 * than sent as nulls; an empty query is an inline validation failure and no
 * request is produced.
 */
export function stateToRequest(state: UiState): RequestOrError {
  if (!state.query.trim()) {
    return { ok: false, message: "Enter a question first." };
  }
  if (state.numArticles < 1 || state.numArticles > 50) {
    return { ok: false, message: "Number of articles must be between 1 and 50." };
  }
  for (const value of [state.dateFrom, state.dateTo]) {
    if (value !== null && value !== "" && !ISO_DATE.test(value)) {
      return { ok: false, message: `Dates must be YYYY-MM-DD (got "${value}").` };
    }
  }
  const request: SearchRequest = { query: state.query.trim(), k: state.numArticles };
  if (state.langs.length > 0) request.langs = [...state.langs];
  if (state.dateFrom) request.date_from = state.dateFrom;
  if (state.dateTo) request.date_to = state.dateTo;
  return { ok: true, request };
}
