/** Pure view functions: search response in, HTML string out.
 *
 * Span offsets from the engine are Unicode codepoint indices, not UTF-16
 * units, so all body slicing here goes through a codepoint array; otherwise
 * any astral character before a span would shift every highlight.
 */

import { colorName } from "./palette.js";
import { isSearchResponse, type CorpusStats, type SearchResponse, type WireResult } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Slice by codepoint offsets (engine offsets are codepoint-based). */
export function sliceCodepoints(text: string, start: number, end: number): string {
  return Array.from(text).slice(start, end).join("");
}

/** Body HTML with each span wrapped in its color-mapped highlight. */
export function renderHighlightedBody(result: WireResult): string {
  const spans = result.spans
    .map((span, i) => ({ span, color: result.highlight_colors[i] ?? i }))
    .sort((a, b) => a.span.start - b.span.start);
  let html = "";
  let cursor = 0;
  for (const { span, color } of spans) {
    html += escapeHtml(sliceCodepoints(result.body, cursor, span.start));
    html +=
      `<mark class="hl hl-${colorName(color)}" data-color="${color}">` +
      escapeHtml(sliceCodepoints(result.body, span.start, span.end)) +
      "</mark>";
    cursor = span.end;
  }
  html += escapeHtml(sliceCodepoints(result.body, cursor, Array.from(result.body).length));
  return html;
}

function renderAnswerList(result: WireResult): string {
  if (result.spans.length === 0) {
    return '<p class="no-answers">No answer span found in this document.</p>';
  }
  const rows = result.spans.map((span, i) => {
    const color = result.highlight_colors[i] ?? i;
    const translation = result.answer_translations?.[i];
    const translated = translation !== undefined && translation !== span.text
      ? ` <span class="answer-translation">${escapeHtml(translation)}</span>`
      : "";
    return (
      `<li><span class="swatch swatch-${colorName(color)}" data-color="${color}"></span>` +
      `<span class="answer-text">${escapeHtml(span.text)}</span>${translated}</li>`
    );
  });
  return `<ul class="answers">${rows.join("")}</ul>`;
}

export function renderCard(result: WireResult, expanded: boolean): string {
  const dateLabel = result.date ?? "undated";
  const translationBlock = result.body_translation
    ? `<div class="translation"><h4>Translation</h4><p>${escapeHtml(result.body_translation)}</p></div>`
    : "";
  const diagnostics = result.diagnostics.length
    ? `<p class="diagnostics">${escapeHtml(result.diagnostics.join("; "))}</p>`
    : "";
  return (
    `<details class="result-card" data-doc-id="${escapeHtml(result.doc_id)}"${expanded ? " open" : ""}>` +
    `<summary><span class="pub-date">${escapeHtml(dateLabel)}</span>` +
    `<span class="lang-tag">${escapeHtml(result.lang)}</span></summary>` +
    `<div class="card-body">` +
    `<h3 class="doc-title">${escapeHtml(result.title)}</h3>` +
    `<p class="doc-body">${renderHighlightedBody(result)}</p>` +
    renderAnswerList(result) +
    translationBlock +
    diagnostics +
    `</div></details>`
  );
}

export const FALLBACK_BANNER =
  '<div class="banner fallback-banner">No documents matched the requested date range; ' +
  "results below are drawn from all dates.</div>";

/** Full results pane. Malformed payloads become an error card, never a blank page. */
export function renderResults(payload: unknown, expandedIds: string[] = []): string {
  if (!isSearchResponse(payload)) {
    return '<div class="banner error-banner">The search service returned an unexpected response.</div>';
  }
  const response: SearchResponse = payload;
  const banner = response.fallback_used ? FALLBACK_BANNER : "";
  if (response.results.length === 0) {
    return `${banner}<p class="empty">No results.</p>`;
  }
  const cards = response.results
    .map((result, i) => renderCard(result, expandedIds.includes(result.doc_id) || i === 0))
    .join("");
  return `${banner}<div class="results">${cards}</div>`;
}

/** Sidebar language checkboxes come from live corpus stats, not a hardcoded list. */
export function renderLanguageOptions(stats: CorpusStats, selected: string[]): string {
  const langs = Object.keys(stats.per_lang).sort(
    (a, b) => (stats.per_lang[b] ?? 0) - (stats.per_lang[a] ?? 0) || a.localeCompare(b),
  );
  return langs
    .map((lang) => {
      const checked = selected.includes(lang) ? " checked" : "";
      return (
        `<label class="lang-option"><input type="checkbox" name="lang" value="${lang}"${checked}>` +
        `${lang} <span class="lang-count">(${stats.per_lang[lang]})</span></label>`
      );
    })
    .join("");
}
