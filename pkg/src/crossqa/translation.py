"""Translation backends behind one contract.

The wire contract is ``{"texts": [...], "source": "xx", "target": "yy"}`` in,
``{"texts": [...]}`` out, order-aligned. Besides the HTTP client there are two
deterministic local backends: an identity translator (the default stand-in
when no model service is configured) and a word-substitution translator driven
by per-language-pair lexicons, used by fixtures and demos to build bilingual
corpora with controlled vocabulary overlap.
"""

from __future__ import annotations

import os
from typing import Mapping, Sequence

from .errors import TransportError, TranslationError


class EchoTranslator:
    """Identity translation; keeps texts unchanged.

    Useful wherever a translation is structurally required but no model is
    available: downstream similarity between "translation" and original is
    then maximal, which the filtering tests rely on.
    """

    def translate(self, texts: Sequence[str], source: str, target: str) -> list[str]:
        return list(texts)

    def probe(self, timeout: float = 1.0) -> bool:
        return True


class MappingTranslator:
    """Word-substitution translation over per-pair lexicons.

    ``lexicons`` maps (source, target) to a word table. Words are split on
    whitespace and mapped case-sensitively; words missing from the table pass
    through unchanged. A language pair with no lexicon raises
    :class:`TranslationError`.
    """

    def __init__(self, lexicons: Mapping[tuple[str, str], Mapping[str, str]]):
        self.lexicons = dict(lexicons)

    def translate(self, texts: Sequence[str], source: str, target: str) -> list[str]:
        if source == target:
            return list(texts)
        lex = self.lexicons.get((source, target))
        if lex is None:
            raise TranslationError(f"no lexicon for language pair {source}->{target}")
        return [" ".join(lex.get(word, word) for word in text.split()) for text in texts]

    def probe(self, timeout: float = 1.0) -> bool:
        return True


class RemoteTranslator:
    """HTTP client for the translation wire contract."""

    def __init__(self, endpoint: str, timeout: float = 60.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def translate(self, texts: Sequence[str], source: str, target: str) -> list[str]:
        import httpx

        payload = {"texts": list(texts), "source": source, "target": target}
        try:
            resp = httpx.post(self.endpoint, json=payload, timeout=self.timeout)
            resp.raise_for_status()
            data = resp.json()
        except httpx.HTTPError as exc:
            raise TransportError(f"translation endpoint {self.endpoint} failed: {exc}") from exc
        out = data.get("texts")
        if not isinstance(out, list) or len(out) != len(texts):
            raise TransportError("malformed translation response")
        return [str(t) for t in out]

    def probe(self, timeout: float = 1.0) -> bool:
        import httpx

        try:
            httpx.post(
                self.endpoint,
                json={"texts": ["ping"], "source": "en", "target": "en"},
                timeout=timeout,
            )
            return True
        except httpx.HTTPError:
            return False


def translator_from_env(env=os.environ):
    """TRANSLATE_ENDPOINT selects the HTTP backend; otherwise identity."""
    endpoint = env.get("TRANSLATE_ENDPOINT")
    if endpoint:
        return RemoteTranslator(endpoint)
    return EchoTranslator()
