"""Readers for the typosmith tokenizer artifacts.

The trainer talks to the data pipeline only through its emitted files,
so this module re-derives everything it needs from two of them:

* the merges file — ``#bpe-merges v1 target_size=N`` header, then one
  ``left right`` merge per line in fit order (earlier = higher priority);
* the token table — ``#bpe-tokens v1 count=N`` header, then one token
  per line whose id is its position, with the four reserved specials
  ``<pad> <bos> <eos> <unk>`` at ids 0..3.

Both files may carry leading ``#`` provenance comments ahead of their
real header, which also starts with ``#``; comments are skipped by
prefix.  Encoding applies the merges greedily (lowest rank first) to
each whitespace-delimited word plus a private-use end-of-word marker,
exactly like the upstream encoder, so ids produced here agree with ids
in the emitted datasets.  Characters unseen at fit time stay
single-character symbols and map to ``<unk>``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

WORD_MARKER = ""  # private-use; ends every word's symbol sequence

_SEGMENT = re.compile(r"\s+|\S+")

SPECIAL_TOKENS = ("<pad>", "<bos>", "<eos>", "<unk>")
PAD_ID, BOS_ID, EOS_ID, UNK_ID = range(4)

MERGES_HEADER_PREFIX = "#bpe-merges v1 target_size="
TOKENS_HEADER_PREFIX = "#bpe-tokens v1 count="


class VocabError(ValueError):
    """Raised for unreadable or malformed tokenizer artifacts."""


def _strip_comments(lines: list[str], header_prefix: str) -> list[str]:
    """Drop leading '#' comments, keeping the real header line."""
    i = 0
    while (i < len(lines) and lines[i].startswith("#")
           and not lines[i].startswith(header_prefix)):
        i += 1
    return lines[i:]


def load_merges(path: str | Path) -> list[tuple[str, str]]:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise VocabError(f"cannot read merges file {path}: {exc}") from exc
    lines = _strip_comments(lines, MERGES_HEADER_PREFIX)
    if not lines or not lines[0].startswith(MERGES_HEADER_PREFIX):
        raise VocabError(f"{path}: missing '{MERGES_HEADER_PREFIX}' header")
    merges: list[tuple[str, str]] = []
    for n, line in enumerate(lines[1:], 2):
        if not line:
            continue
        parts = line.split(" ")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise VocabError(f"{path}:{n}: expected 'left right'")
        merges.append((parts[0], parts[1]))
    return merges


def load_token_table(path: str | Path) -> list[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().split("\n")
    except OSError as exc:
        raise VocabError(f"cannot read token table {path}: {exc}") from exc
    lines = _strip_comments(lines, TOKENS_HEADER_PREFIX)
    if not lines or not lines[0].startswith(TOKENS_HEADER_PREFIX):
        raise VocabError(f"{path}: missing '{TOKENS_HEADER_PREFIX}' header")
    try:
        count = int(lines[0][len(TOKENS_HEADER_PREFIX):])
    except ValueError as exc:
        raise VocabError(f"{path}: malformed count in header") from exc
    table = lines[1:1 + count]
    if len(table) != count or any(not t for t in table):
        raise VocabError(f"{path}: token count does not match header")
    if tuple(table[:4]) != SPECIAL_TOKENS:
        raise VocabError(
            f"{path}: expected specials {SPECIAL_TOKENS} at ids 0..3")
    return table


def _merge_word(symbols: list[str], pair: tuple[str, str]) -> list[str]:
    """Merge every left-to-right occurrence of `pair` in a symbol list."""
    left, right = pair
    out: list[str] = []
    i = 0
    while i < len(symbols):
        if (i + 1 < len(symbols) and symbols[i] == left
                and symbols[i + 1] == right):
            out.append(left + right)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return out


@dataclass
class SubwordVocab:
    """Merge rules plus the id table, loaded from the emitted files."""

    merges: list[tuple[str, str]]
    table: list[str]
    _ranks: dict[tuple[str, str], int] = field(
        default_factory=dict, repr=False, compare=False)
    _index: dict[str, int] = field(
        default_factory=dict, repr=False, compare=False)
    _word_cache: dict[str, list[int]] = field(
        default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self._ranks = {pair: i for i, pair in enumerate(self.merges)}
        self._index = {t: i for i, t in enumerate(self.table)}

    @classmethod
    def load(cls, merges_path: str | Path,
             tokens_path: str | Path) -> "SubwordVocab":
        return cls(load_merges(merges_path), load_token_table(tokens_path))

    @property
    def size(self) -> int:
        return len(self.table)

    def _encode_word(self, word: str) -> list[int]:
        cached = self._word_cache.get(word)
        if cached is not None:
            return cached
        symbols = list(word) + [WORD_MARKER]
        ranks = self._ranks
        while len(symbols) > 1:
            best = min(
                (pair for pair in zip(symbols, symbols[1:]) if pair in ranks),
                key=ranks.get, default=None)
            if best is None:
                break
            symbols = _merge_word(symbols, best)
        ids = [self._index.get(s, UNK_ID) for s in symbols]
        self._word_cache[word] = ids
        return ids

    def encode(self, text: str) -> list[int]:
        """Text to token ids; whitespace runs are their own tokens."""
        if WORD_MARKER in text:
            raise VocabError(
                f"text contains the reserved marker U+{ord(WORD_MARKER):04X}")
        ids: list[int] = []
        for segment in _SEGMENT.findall(text):
            if segment.isspace():
                ids.append(self._index.get(segment, UNK_ID))
            else:
                ids.extend(self._encode_word(segment))
        return ids

    def decode(self, ids: list[int]) -> str:
        """Token ids back to text: strip pad/bos/eos, drop word markers."""
        tokens = []
        for i in ids:
            if i in (PAD_ID, BOS_ID, EOS_ID):
                continue
            if not 0 <= i < len(self.table):
                raise VocabError(
                    f"token id {i} out of range for vocabulary of "
                    f"{len(self.table)} tokens")
            tokens.append(self.table[i])
        return "".join(tokens).replace(WORD_MARKER, "")
