"""Byte-pair-encoding subword vocabulary: fitting, coding, dataset split.

Classic word-level BPE with an end-of-word marker: words are split to
characters plus a marker symbol, and the most frequent adjacent symbol
pair is merged greedily until the token inventory reaches the target
size (or no pair occurs twice).  Ties on frequency break
lexicographically on the (left, right) symbol strings so fitting is
reproducible across platforms and runs.

Whitespace is never folded into subwords: each run of whitespace
becomes its own pass-through token, which keeps ``decode(encode(s))``
exactly equal to ``s`` for any text whose characters were seen at fit
time.  The marker is a private-use codepoint; fitting and encoding
reject text that already contains it rather than silently corrupting
the round-trip.
"""

from __future__ import annotations

import re
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

WORD_MARKER = ""  # private-use; end-of-word sentinel

# Reserved ids 0..3 in the token table, ahead of every real token.
SPECIAL_TOKENS = ("<pad>", "<bos>", "<eos>", "<unk>")
UNK_ID = SPECIAL_TOKENS.index("<unk>")

VOCAB_HEADER_PREFIX = "#bpe-merges v1 target_size="
TOKEN_HEADER_PREFIX = "#bpe-tokens v1 count="

_WS_RUN = re.compile(r"\s+")
_SEGMENT = re.compile(r"\s+|\S+")


class BpeError(ValueError):
    """Raised for invalid corpora, targets, or unreadable vocab files."""


@dataclass
class BpeVocab:
    merges: list[tuple[str, str]]
    base: frozenset[str]  # single characters seen at fit time, plus marker
    vocab_size: int  # the fitting target, not necessarily reached
    passthrough: frozenset[str] = frozenset()  # whitespace runs seen at fit
    _ranks: dict[tuple[str, str], int] = field(
        default_factory=dict, repr=False, compare=False)
    _word_cache: dict[str, tuple[str, ...]] = field(
        default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self._ranks = {pair: i for i, pair in enumerate(self.merges)}

    @property
    def tokens(self) -> frozenset[str]:
        return self.base | {left + right for left, right in self.merges}


def _check_no_marker(text: str) -> None:
    if WORD_MARKER in text:
        raise BpeError(
            f"text contains the reserved marker U+{ord(WORD_MARKER):04X}")


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


def _word_pairs(symbols: Sequence[str]) -> Counter[tuple[str, str]]:
    return Counter(zip(symbols, symbols[1:]))


def fit(corpus: Iterable[str], target_size: int) -> BpeVocab:
    """Fit a BPE vocabulary of at most `target_size` token types.

    Greedy: repeatedly merge the highest-frequency adjacent symbol pair,
    lexicographic tie-break, until the inventory is full or the best
    pair occurs fewer than 2 times.
    """
    word_freq: Counter[str] = Counter()
    ws_runs: set[str] = set()
    for line in corpus:
        _check_no_marker(line)
        word_freq.update(line.split())
        ws_runs.update(_WS_RUN.findall(line))
    if not word_freq:
        raise BpeError("corpus contains no words")

    base = frozenset(ch for w in word_freq for ch in w) | {WORD_MARKER}
    if target_size < len(base):
        raise BpeError(
            f"target_size {target_size} is below the base inventory "
            f"of {len(base)} characters")

    words = [list(w) + [WORD_MARKER] for w in word_freq]
    freqs = list(word_freq.values())
    pair_counts: Counter[tuple[str, str]] = Counter()
    pair_to_words: dict[tuple[str, str], set[int]] = {}
    for idx, symbols in enumerate(words):
        for pair, n in _word_pairs(symbols).items():
            pair_counts[pair] += n * freqs[idx]
            pair_to_words.setdefault(pair, set()).add(idx)

    merges: list[tuple[str, str]] = []
    inventory = len(base)
    while inventory < target_size and pair_counts:
        best = min(pair_counts, key=lambda p: (-pair_counts[p], p))
        if pair_counts[best] < 2:
            break
        for idx in sorted(pair_to_words[best]):
            old = words[idx]
            new = _merge_word(old, best)
            words[idx] = new
            for pair, n in _word_pairs(old).items():
                pair_counts[pair] -= n * freqs[idx]
                if pair_counts[pair] <= 0:
                    del pair_counts[pair]
                    pair_to_words.pop(pair, None)
                elif pair in pair_to_words:
                    pair_to_words[pair].discard(idx)
            for pair, n in _word_pairs(new).items():
                pair_counts[pair] += n * freqs[idx]
                pair_to_words.setdefault(pair, set()).add(idx)
        merges.append(best)
        inventory += 1

    return BpeVocab(merges=merges, base=base, vocab_size=target_size,
                    passthrough=frozenset(ws_runs))


def _encode_word(word: str, vocab: BpeVocab) -> tuple[str, ...]:
    cached = vocab._word_cache.get(word)
    if cached is not None:
        return cached
    symbols = list(word) + [WORD_MARKER]
    ranks = vocab._ranks
    while len(symbols) > 1:
        best = min(
            (pair for pair in zip(symbols, symbols[1:]) if pair in ranks),
            key=ranks.get, default=None)
        if best is None:
            break
        symbols = _merge_word(symbols, best)
    result = tuple(symbols)
    vocab._word_cache[word] = result
    return result


def encode(text: str, vocab: BpeVocab) -> list[str]:
    """Segment text into subword tokens; whitespace runs pass through.

    Characters unseen at fit time simply stay single-character tokens —
    no merge mentions them, so they fall out of the loop untouched.
    """
    _check_no_marker(text)
    tokens: list[str] = []
    for segment in _SEGMENT.findall(text):
        if segment.isspace():
            tokens.append(segment)
        else:
            tokens.extend(_encode_word(segment, vocab))
    return tokens


def decode(tokens: Iterable[str]) -> str:
    return "".join(tokens).replace(WORD_MARKER, "")


# ---------------------------------------------------------------------------
# Token-id table (for the downstream trainer)

def build_token_table(vocab: BpeVocab) -> list[str]:
    """Stable token→id table: specials, base, merge products, whitespace.

    Ids are line positions; the four reserved specials come first so a
    seq2seq consumer can rely on fixed pad/bos/eos/unk ids.
    """
    table = list(SPECIAL_TOKENS)
    seen = set(table)
    for token in sorted(vocab.base):
        if token not in seen:
            table.append(token)
            seen.add(token)
    for left, right in vocab.merges:
        product = left + right
        if product not in seen:
            table.append(product)
            seen.add(product)
    for token in sorted(vocab.passthrough):
        if token not in seen:
            table.append(token)
            seen.add(token)
    return table


def tokens_to_ids(tokens: Iterable[str], table_index: dict[str, int],
                  ) -> list[int]:
    return [table_index.get(t, UNK_ID) for t in tokens]


# ---------------------------------------------------------------------------
# Dataset split

def split_dataset(lines: Sequence[str], seed: int,
                  ) -> tuple[list[str], list[str], list[str]]:
    """Shuffle and partition into train/validation/test at 100:1:1.

    Exact to rounding: each small split gets len(lines) // 102 lines,
    the train split takes the rest.  Same seed, same partition.
    """
    lines = list(lines)
    n = len(lines)
    k = n // 102
    order = np.random.default_rng(seed).permutation(n)
    train = [lines[i] for i in order[:n - 2 * k]]
    valid = [lines[i] for i in order[n - 2 * k:n - k]]
    test = [lines[i] for i in order[n - k:]]
    return train, valid, test


# ---------------------------------------------------------------------------
# File formats

def _skip_meta_comments(lines: list[str], header_prefix: str) -> list[str]:
    """Drop leading '#' provenance comments, keeping the real header
    (which itself starts with '#bpe-')."""
    i = 0
    while (i < len(lines) and lines[i].startswith("#")
           and not lines[i].startswith(header_prefix)):
        i += 1
    return lines[i:]


def save_vocab(vocab: BpeVocab, path: str | Path) -> None:
    """Write the merges file: one header line, then `left right` lines."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{VOCAB_HEADER_PREFIX}{vocab.vocab_size}\n")
        for left, right in vocab.merges:
            fh.write(f"{left} {right}\n")


def load_vocab(path: str | Path) -> BpeVocab:
    """Load a merges file.

    The base inventory is not stored in the file; the loaded vocabulary
    reconstructs what the merges imply, which is all `encode` needs —
    characters without merges pass through as themselves either way.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise BpeError(f"cannot read vocab file {path}: {exc}") from exc
    lines = _skip_meta_comments(lines, VOCAB_HEADER_PREFIX)
    if not lines or not lines[0].startswith(VOCAB_HEADER_PREFIX):
        raise BpeError(f"{path}: missing '{VOCAB_HEADER_PREFIX}' header")
    try:
        target_size = int(lines[0][len(VOCAB_HEADER_PREFIX):])
    except ValueError as exc:
        raise BpeError(f"{path}: malformed target size in header") from exc
    merges: list[tuple[str, str]] = []
    for n, line in enumerate(lines[1:], 2):
        if not line:
            continue
        parts = line.split(" ")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise BpeError(f"{path}:{n}: expected 'left right'")
        merges.append((parts[0], parts[1]))
    base = frozenset(
        ch for pair in merges for side in pair for ch in side) | {WORD_MARKER}
    return BpeVocab(merges=merges, base=base, vocab_size=target_size)


def save_token_table(table: Sequence[str], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{TOKEN_HEADER_PREFIX}{len(table)}\n")
        for token in table:
            fh.write(token + "\n")


def load_token_table(path: str | Path) -> list[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().split("\n")
    except OSError as exc:
        raise BpeError(f"cannot read token table {path}: {exc}") from exc
    lines = _skip_meta_comments(lines, TOKEN_HEADER_PREFIX)
    if not lines or not lines[0].startswith(TOKEN_HEADER_PREFIX):
        raise BpeError(f"{path}: missing '{TOKEN_HEADER_PREFIX}' header")
    try:
        count = int(lines[0][len(TOKEN_HEADER_PREFIX):])
    except ValueError as exc:
        raise BpeError(f"{path}: malformed count in header") from exc
    table = lines[1:1 + count]
    if len(table) != count or any(not t for t in table):
        raise BpeError(f"{path}: token count does not match header")
    return table
