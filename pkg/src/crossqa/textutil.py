"""Unicode text helpers shared by the tokenizers, the embedding stub, and metrics."""

from __future__ import annotations

import unicodedata

# Han ideographs and kana. Codepoints in these ranges become single-character
# tokens so Chinese and Japanese work without a word segmenter.
_CJK_RANGES = (
    (0x3040, 0x30FF),    # hiragana, katakana
    (0x31F0, 0x31FF),    # katakana phonetic extensions
    (0x3400, 0x4DBF),    # CJK unified ideographs extension A
    (0x4E00, 0x9FFF),    # CJK unified ideographs
    (0xF900, 0xFAFF),    # CJK compatibility ideographs
    (0x20000, 0x2EBEF),  # CJK unified ideographs extensions B through F
)


def is_cjk_char(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _CJK_RANGES)


def normalize_text(text: str) -> str:
    """Lowercase, then apply NFKC normalization."""
    return unicodedata.normalize("NFKC", text.lower())


def tokenize(text: str, split_cjk: bool = True) -> list[str]:
    """Split normalized text on non-alphanumeric codepoints.

    With ``split_cjk``, every Han or kana codepoint is emitted as its own
    token. Empty input yields an empty list.
    """
    tokens: list[str] = []
    buf: list[str] = []
    for ch in normalize_text(text):
        if not ch.isalnum():
            if buf:
                tokens.append("".join(buf))
                buf = []
        elif split_cjk and is_cjk_char(ch):
            if buf:
                tokens.append("".join(buf))
                buf = []
            tokens.append(ch)
        else:
            buf.append(ch)
    if buf:
        tokens.append("".join(buf))
    return tokens


def tokenize_with_offsets(text: str, split_cjk: bool = True) -> list[tuple[str, int, int]]:
    """Tokenize while keeping ``(token, start, end)`` offsets into the raw text.

    Token boundaries are decided on the raw codepoints and the token text is
    normalized per token, so offsets always address exact substrings of the
    original string. Used by span extraction, where ``text[start:end]`` must
    reproduce the source verbatim.
    """
    out: list[tuple[str, int, int]] = []
    start = -1

    def flush(end: int) -> None:
        nonlocal start
        if start >= 0:
            out.append((normalize_text(text[start:end]), start, end))
            start = -1

    for i, ch in enumerate(text):
        if not ch.isalnum():
            flush(i)
        elif split_cjk and is_cjk_char(ch):
            flush(i)
            out.append((normalize_text(ch), i, i + 1))
        else:
            if start < 0:
                start = i
    flush(len(text))
    return out
