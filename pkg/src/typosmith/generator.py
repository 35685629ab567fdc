"""Artificial typo generation.

Two modes: *realistic* draws edit kind, position and characters from mined
TypoStats; *uniform* draws everything uniformly (maximum-entropy floor for
comparisons). The number of edits per record follows a truncated Poisson
law whose rate is calibrated so the truncated mean equals the configured
mean — plain Poisson(m) truncated to [0, max] would undershoot the mean.

Every record is corrupted with its own RNG seeded from (seed, line index),
so output is reproducible and independent of processing order.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .editdist import EditClassification, EditKind, apply_edit
from .stats import KIND_ORDER, TypoStats

ASCII_LETTERS = string.ascii_lowercase + string.ascii_uppercase  # 52 chars

REALISTIC = "realistic"
UNIFORM = "uniform"


class GenerationError(ValueError):
    """Raised for invalid generation configuration."""


@dataclass(frozen=True)
class GenerationConfig:
    mode: str = REALISTIC
    mean_typos_per_record: float = 1.0
    max_typos_per_record: int = 3
    seed: int = 1
    uniform_alphabet: str = ASCII_LETTERS
    min_length: int = 2

    def validate(self) -> None:
        if self.mode not in (REALISTIC, UNIFORM):
            raise GenerationError(f"unknown mode {self.mode!r}")
        if self.mean_typos_per_record <= 0:
            raise GenerationError("mean_typos_per_record must be > 0")
        if self.max_typos_per_record < 0:
            raise GenerationError("max_typos_per_record must be >= 0")
        if self.min_length < 0:
            raise GenerationError("min_length must be >= 0")
        if self.mode == UNIFORM and not self.uniform_alphabet:
            raise GenerationError("uniform mode needs a non-empty alphabet")


@dataclass
class EditLog:
    """Edits applied to one record, in application order.

    Positions refer to the intermediate string each edit was applied to, so
    replaying the log from the original record reproduces the output.
    """

    entries: List[EditClassification] = field(default_factory=list)

    def replay(self, original: str) -> str:
        cur = original
        for edit in self.entries:
            cur = apply_edit(edit, cur)
        return cur

    def __len__(self) -> int:
        return len(self.entries)


class EditCountLaw:
    """Truncated Poisson on [0, max], rate calibrated to hit a target mean.

    P(k) ∝ rate^k / k! for k in 0..max. The rate solves
    E[k | truncation] == mean via root finding; if the target mean is
    unreachable (mean >= max) the law degenerates to a point mass at max.
    """

    def __init__(self, mean: float, max_edits: int):
        if mean <= 0:
            raise GenerationError("mean must be > 0")
        if max_edits < 0:
            raise GenerationError("max_edits must be >= 0")
        self.mean = mean
        self.max_edits = max_edits
        ks = np.arange(max_edits + 1)
        if max_edits == 0 or mean >= max_edits:
            probs = np.zeros(max_edits + 1)
            probs[-1] = 1.0
            self.rate = math.inf
        else:
            factorials = np.array(
                [math.factorial(int(k)) for k in ks], dtype=float)

            def truncated_mean(rate: float) -> float:
                w = rate ** ks / factorials
                return float((ks * w).sum() / w.sum())

            self.rate = brentq(
                lambda r: truncated_mean(r) - mean, 1e-12, 1e6, xtol=1e-12)
            w = self.rate ** ks / factorials
            probs = w / w.sum()
        self.probs = probs
        self._cum = np.cumsum(probs)

    def pmf(self, k: int) -> float:
        if not 0 <= k <= self.max_edits:
            return 0.0
        return float(self.probs[k])

    def sample(self, rng: np.random.Generator) -> int:
        return int(np.searchsorted(self._cum, rng.random(), side="right"))


_law_cache: dict = {}


def edit_count_law(mean: float, max_edits: int) -> EditCountLaw:
    key = (mean, max_edits)
    law = _law_cache.get(key)
    if law is None:
        law = _law_cache[key] = EditCountLaw(mean, max_edits)
    return law


def sample_edit_count(config: GenerationConfig,
                      rng: np.random.Generator) -> int:
    """Draw the number of edits for one record."""
    return edit_count_law(config.mean_typos_per_record,
                          config.max_typos_per_record).sample(rng)


def line_rng(seed: int, line_index: int) -> np.random.Generator:
    """Per-record generator: a fresh stream keyed on (seed, line index)."""
    return np.random.default_rng([seed, line_index])


# ---------------------------------------------------------------------------
# single-edit application

def _draw(rng: np.random.Generator, items: list, probs: list):
    cum = np.cumsum(probs)
    idx = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    return items[min(idx, len(items) - 1)]


def _draw_from_row(ch: str, stats: TypoStats, rng: np.random.Generator,
                   fallback_alphabet: str) -> str:
    """Character drawn from ch's confusion row.

    Characters without a row fall back to a uniform draw over the row-key
    alphabet (excluding ch), and to ``fallback_alphabet`` when the stats
    have no confusion rows at all.
    """
    row = stats.confusion.get(ch)
    if row:
        return _draw(rng, list(row.keys()), list(row.values()))
    keys = [c for c in sorted(stats.confusion) if c != ch]
    if not keys:
        keys = [c for c in fallback_alphabet if c != ch] or [ch]
    return keys[int(rng.integers(len(keys)))]


def generate_typo(text: str, stats: TypoStats, rng: np.random.Generator,
                  min_length: int = 2,
                  fallback_alphabet: str = ASCII_LETTERS,
                  ) -> Tuple[str, EditLog]:
    """Apply one stats-driven edit to ``text``.

    Texts shorter than ``min_length`` come back unchanged with an empty
    log. A transposition drawn at the last index resamples its position
    once, then falls back to a substitution.
    """
    if len(text) < min_length or not text:
        return text, EditLog()
    kinds = [stats.type_freq[k] for k in KIND_ORDER]
    kind = _draw(rng, list(KIND_ORDER), kinds)
    pmf = stats.position_pmf(len(text))
    p = _sample_position(pmf, rng)
    if kind is EditKind.TRANSPOSITION and p == len(text) - 1:
        p = _sample_position(pmf, rng)
        if p == len(text) - 1:
            kind = EditKind.SUBSTITUTION

    if kind is EditKind.SUBSTITUTION:
        new = _draw_from_row(text[p], stats, rng, fallback_alphabet)
        edit = EditClassification(EditKind.SUBSTITUTION, p, (text[p], new))
    elif kind is EditKind.INSERTION:
        ins = _draw_from_row(text[p], stats, rng, fallback_alphabet)
        edit = EditClassification(EditKind.INSERTION, p + 1, (ins,))
    elif kind is EditKind.DELETION:
        edit = EditClassification(EditKind.DELETION, p, (text[p],))
    else:
        edit = EditClassification(
            EditKind.TRANSPOSITION, p, (text[p], text[p + 1]))
    return apply_edit(edit, text), EditLog([edit])


def _sample_position(pmf: np.ndarray, rng: np.random.Generator) -> int:
    cum = np.cumsum(pmf)
    idx = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    return min(idx, len(pmf) - 1)


def uniform_typo(text: str, config: GenerationConfig,
                 rng: np.random.Generator) -> Tuple[str, EditLog]:
    """Apply one uniformly drawn edit: kind, position and characters all
    uniform; characters over ``config.uniform_alphabet``."""
    config.validate()
    if len(text) < config.min_length or not text:
        return text, EditLog()
    alphabet = config.uniform_alphabet
    kind = KIND_ORDER[int(rng.integers(4))]
    if kind is EditKind.TRANSPOSITION and len(text) < 2:
        kind = EditKind.SUBSTITUTION
    if kind is EditKind.INSERTION:
        p = int(rng.integers(len(text) + 1))
        ch = alphabet[int(rng.integers(len(alphabet)))]
        edit = EditClassification(EditKind.INSERTION, p, (ch,))
    elif kind is EditKind.SUBSTITUTION:
        p = int(rng.integers(len(text)))
        ch = alphabet[int(rng.integers(len(alphabet)))]
        edit = EditClassification(EditKind.SUBSTITUTION, p, (text[p], ch))
    elif kind is EditKind.DELETION:
        p = int(rng.integers(len(text)))
        edit = EditClassification(EditKind.DELETION, p, (text[p],))
    else:
        p = int(rng.integers(len(text) - 1))
        edit = EditClassification(
            EditKind.TRANSPOSITION, p, (text[p], text[p + 1]))
    return apply_edit(edit, text), EditLog([edit])


def corrupt_corpus(lines: Iterable[str], stats: Optional[TypoStats],
                   config: GenerationConfig,
                   ) -> Iterator[Tuple[str, str, EditLog]]:
    """Corrupt a corpus line by line, yielding (typo, original, log).

    The edit count per line is drawn from the calibrated truncated Poisson
    law; k == 0 yields identity pairs. Realistic mode requires ``stats``.
    """
    config.validate()
    if config.mode == REALISTIC and stats is None:
        raise GenerationError("realistic mode requires stats")
    law = edit_count_law(config.mean_typos_per_record,
                         config.max_typos_per_record)
    for index, line in enumerate(lines):
        rng = line_rng(config.seed, index)
        k = law.sample(rng)
        cur = line
        entries: List[EditClassification] = []
        for _ in range(k):
            if config.mode == UNIFORM:
                cur, log = uniform_typo(cur, config, rng)
            else:
                cur, log = generate_typo(cur, stats, rng, config.min_length)
            entries.extend(log.entries)
        yield cur, line, EditLog(entries)
