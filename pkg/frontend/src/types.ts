/** Wire types for the engine's search API. */

export interface SearchRequest {
  query: string;
  k: number;
  langs?: string[];
  date_from?: string;
  date_to?: string;
}

export interface WireSpan {
  start: number;
  end: number;
  text: string;
  confidence: number;
}

export interface WireResult {
  doc_id: string;
  title: string;
  date: string | null;
  lang: string;
  body: string;
  retrieval_score: number;
  spans: WireSpan[];
  highlight_colors: number[];
  answer_translations: string[] | null;
  body_translation: string | null;
  diagnostics: string[];
}

export interface SearchResponse {
  schema_version: number;
  results: WireResult[];
  fallback_used: boolean;
  degraded?: boolean;
  timing_ms: number;
}

export interface CorpusStats {
  total: number;
  per_lang: Record<string, number>;
  date_min: string | null;
  date_max: string | null;
}

export interface ApiError {
  error: { code: string; message: string };
}

export function isSearchResponse(value: unknown): value is SearchResponse {
  if (typeof value !== "object" || value === null) return false;
  const candidate = value as Record<string, unknown>;
  return Array.isArray(candidate.results) && typeof candidate.fallback_used === "boolean";
}
