"""Answer span extraction backends.

The deterministic stub scores a sliding window of tokens by lexical overlap
with the question, so the whole pipeline runs and is testable without any
model service. The HTTP client talks to a reader model exposing the wire
contract ``{"question", "context", "max_answers"}`` in, ``{"spans": [...]}``
out. Either way, spans are exact substrings of the original context.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .errors import ExtractionError, TransportError
from .textutil import tokenize, tokenize_with_offsets

WINDOW_TOKENS = 20


@dataclass(frozen=True)
class AnswerSpan:
    """A span in a document body; ``text`` is exactly ``body[start:end]``."""

    start_char: int
    end_char: int
    text: str
    confidence: float

    def __post_init__(self):
        if not 0 <= self.start_char < self.end_char:
            raise ValueError(f"bad span offsets [{self.start_char}, {self.end_char})")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")


def spans_overlap(a: AnswerSpan, b: AnswerSpan) -> bool:
    return a.start_char < b.end_char and b.start_char < a.end_char


def validate_spans(spans: Sequence[AnswerSpan], body: str) -> None:
    """Check span integrity against the body; raises ExtractionError."""
    for span in spans:
        if span.end_char > len(body):
            raise ExtractionError(f"span [{span.start_char}, {span.end_char}) exceeds body")
        if body[span.start_char:span.end_char] != span.text:
            raise ExtractionError(
                f"span text mismatch at [{span.start_char}, {span.end_char})"
            )
    ordered = sorted(spans, key=lambda s: s.start_char)
    for left, right in zip(ordered, ordered[1:]):
        if spans_overlap(left, right):
            raise ExtractionError("overlapping spans")


def stub_extract_spans(question: str, body: str, max_answers: int = 3) -> list[AnswerSpan]:
    """Deterministic lexical-overlap extractor.

    Slides a window of up to 20 tokens over the body; a window's score is its
    token-multiset overlap with the question divided by 20. The top
    ``max_answers`` non-overlapping windows (leftmost first on score ties)
    come back as spans with the score as confidence; zero-score windows are
    dropped, so an unrelated body yields no answers.
    """
    if max_answers < 1:
        raise ValueError(f"max_answers must be >= 1, got {max_answers}")
    body_tokens = tokenize_with_offsets(body)
    if not body_tokens:
        return []
    question_counts = Counter(tokenize(question))
    n = len(body_tokens)
    width = min(WINDOW_TOKENS, n)

    scored: list[tuple[float, int]] = []
    window_counts = Counter(tok for tok, _, _ in body_tokens[:width])
    overlap = sum((window_counts & question_counts).values())
    if overlap:
        scored.append((overlap / WINDOW_TOKENS, 0))
    for start in range(1, n - width + 1):
        out_tok = body_tokens[start - 1][0]
        window_counts[out_tok] -= 1
        if not window_counts[out_tok]:
            del window_counts[out_tok]
        window_counts[body_tokens[start + width - 1][0]] += 1
        overlap = sum((window_counts & question_counts).values())
        if overlap:
            scored.append((overlap / WINDOW_TOKENS, start))

    chosen: list[tuple[float, int]] = []
    for score, start in sorted(scored, key=lambda si: (-si[0], si[1])):
        if len(chosen) == max_answers:
            break
        if all(start + width <= c or c + width <= start for _, c in chosen):
            chosen.append((score, start))

    spans = [
        AnswerSpan(
            start_char=body_tokens[start][1],
            end_char=body_tokens[start + width - 1][2],
            text=body[body_tokens[start][1]:body_tokens[start + width - 1][2]],
            confidence=score,
        )
        for score, start in chosen
    ]
    return sorted(spans, key=lambda s: (-s.confidence, s.start_char))


class RemoteExtractor:
    """HTTP client for the span-extraction wire contract."""

    def __init__(self, endpoint: str, timeout: float = 60.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def __call__(self, question: str, context: str, max_answers: int = 3) -> list[AnswerSpan]:
        import httpx

        payload = {"question": question, "context": context, "max_answers": max_answers}
        try:
            resp = httpx.post(self.endpoint, json=payload, timeout=self.timeout)
            resp.raise_for_status()
            data = resp.json()
        except httpx.HTTPError as exc:
            raise TransportError(f"extraction endpoint {self.endpoint} failed: {exc}") from exc
        try:
            spans = [
                AnswerSpan(
                    start_char=int(s["start"]),
                    end_char=int(s["end"]),
                    text=str(s["text"]),
                    confidence=float(s["confidence"]),
                )
                for s in data["spans"]
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise TransportError(f"malformed extraction response: {exc}") from exc
        validate_spans(spans, context)
        return spans

    def probe(self, timeout: float = 1.0) -> bool:
        import httpx

        try:
            httpx.post(
                self.endpoint,
                json={"question": "ping", "context": "ping", "max_answers": 1},
                timeout=timeout,
            )
            return True
        except httpx.HTTPError:
            return False


def extractor_from_env(env=os.environ):
    """EXTRACT_ENDPOINT selects the HTTP backend; otherwise the stub."""
    endpoint = env.get("EXTRACT_ENDPOINT")
    if endpoint:
        return RemoteExtractor(endpoint)
    return stub_extract_spans
