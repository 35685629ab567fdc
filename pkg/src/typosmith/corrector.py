"""Noisy-channel statistical spelling corrector with confidence scores.

Scores every candidate correction c of an input t by
``P(c) * P(t | c)``: a unigram language-model prior times a channel
likelihood assembled from TypoStats — the same edit-kind frequencies,
position distribution and confusion rows that drive generation, so a
corrector handed richer statistics has a sharper channel.  The channel
sums over *every* single-edit derivation of t from c (a doubled letter
can come from several insertion slots), weighted by the edit-count law:
``P(k=0)`` backs the identity candidate, ``P(k=1)`` scales each
single-edit path.

Identity is the default: the input itself always stands as a candidate,
its prior floored at ``identity_evidence_mass`` so that gibberish with
an accidentally-popular neighbor is left alone rather than "corrected".
The posterior of the winning candidate is the confidence; outputs below
the caller's threshold fall back to the input.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .editdist import EditKind
from .generator import ASCII_LETTERS, edit_count_law
from .stats import TypoStats

MODEL_VERSION = 1


class CorrectorError(ValueError):
    """Raised for invalid training corpora or unreadable model files."""


@dataclass
class LanguageModel:
    """Unigram counts over full query lines and over whitespace tokens."""

    line_counts: Counter[str] = field(default_factory=Counter)
    token_counts: Counter[str] = field(default_factory=Counter)
    total_lines: int = 0
    total_tokens: int = 0
    smoothing_mass: float = 1e-9

    def __post_init__(self):
        self._alphabet = sorted({ch for line in self.line_counts
                                 for ch in line})

    @property
    def alphabet(self) -> list[str]:
        return self._alphabet

    def probability(self, query: str) -> float:
        count = self.line_counts.get(query, 0)
        if count == 0:
            return self.smoothing_mass
        return count / self.total_lines

    def token_seen(self, token: str) -> bool:
        return token in self.token_counts


def train(corpus: Iterable[str], smoothing_mass: float = 1e-9,
          ) -> LanguageModel:
    """Count queries and tokens; deterministic and order-invariant."""
    line_counts: Counter[str] = Counter()
    token_counts: Counter[str] = Counter()
    for line in corpus:
        line = line.rstrip("\n")
        if not line:
            continue
        line_counts[line] += 1
        token_counts.update(line.split())
    if not line_counts:
        raise CorrectorError("training corpus is empty")
    return LanguageModel(
        line_counts=line_counts,
        token_counts=token_counts,
        total_lines=sum(line_counts.values()),
        total_tokens=sum(token_counts.values()),
        smoothing_mass=smoothing_mass)


# ---------------------------------------------------------------------------
# Candidate enumeration

def candidates(query: str, lm: LanguageModel, max_edits: int = 1,
               cap: int = 50_000) -> set[str]:
    """All strings within OSA distance `max_edits`, plus the input.

    Edits range over the language model's observed character alphabet.
    Oversized sets are truncated deterministically by LM score (ties
    lexicographic); the input itself always survives the cut.
    """
    result = {query}
    frontier = {query}
    for _ in range(max_edits):
        frontier = {c for s in frontier for c in _single_edits(s, lm.alphabet)}
        result |= frontier
    if len(result) > cap:
        ranked = sorted(result,
                        key=lambda c: (-lm.probability(c), c))[:cap]
        result = set(ranked) | {query}
    return result


def _single_edits(s: str, alphabet: list[str]) -> Iterable[str]:
    for i in range(len(s)):
        yield s[:i] + s[i + 1:]  # deletion
    for i in range(len(s) - 1):
        if s[i] != s[i + 1]:
            yield s[:i] + s[i + 1] + s[i] + s[i + 2:]  # transposition
    for ch in alphabet:
        for i in range(len(s)):
            if s[i] != ch:
                yield s[:i] + ch + s[i + 1:]  # substitution
        for i in range(len(s) + 1):
            yield s[:i] + ch + s[i:]  # insertion


# ---------------------------------------------------------------------------
# Channel model

def _char_prob(drawn: str, ref: str, stats: TypoStats,
               fallback_alphabet: str = ASCII_LETTERS) -> float:
    """Probability that the generator draws `drawn` from `ref`'s row.

    Mirrors the generation-side fallback chain: confusion row if the
    reference character has one, else uniform over the row-key alphabet
    minus `ref`, else uniform over the fallback alphabet minus `ref`.
    """
    row = stats.confusion.get(ref)
    if row:
        return row.get(drawn, 0.0)
    keys = [c for c in sorted(stats.confusion) if c != ref]
    if not keys:
        keys = [c for c in fallback_alphabet if c != ref] or [ref]
    return 1.0 / len(keys) if drawn in keys else 0.0


def _edit_path_mass(candidate: str, observed: str, stats: TypoStats) -> float:
    """Sum of generator probabilities over every single edit taking
    `candidate` to `observed` (no edit-count factor).

    A repeated character admits several equivalent insertion or deletion
    slots; each is a distinct generator outcome and all are summed.  The
    rare transposition-at-last-index resample is ignored, so kind terms
    are plain ``type_freq[kind] * pmf[position]``.
    """
    lc, lo = len(candidate), len(observed)
    if lc == 0 or abs(lc - lo) > 1:
        return 0.0
    pmf = stats.position_pmf(lc)
    tf = stats.type_freq
    mass = 0.0
    if lo == lc + 1:
        # insertion after slot q puts observed[q+1] next to candidate[q]
        for p in _matching_insert_positions(candidate, observed):
            if p >= 1:
                mass += (tf[EditKind.INSERTION] * pmf[p - 1]
                         * _char_prob(observed[p], candidate[p - 1], stats))
    elif lo == lc - 1:
        for p in _matching_delete_positions(candidate, observed):
            mass += tf[EditKind.DELETION] * pmf[p]
    else:
        diffs = [i for i in range(lc) if candidate[i] != observed[i]]
        if len(diffs) == 1:
            p = diffs[0]
            mass += (tf[EditKind.SUBSTITUTION] * pmf[p]
                     * _char_prob(observed[p], candidate[p], stats))
        elif (len(diffs) == 2 and diffs[1] == diffs[0] + 1
                and candidate[diffs[0]] == observed[diffs[1]]
                and candidate[diffs[1]] == observed[diffs[0]]):
            mass += tf[EditKind.TRANSPOSITION] * pmf[diffs[0]]
    return mass


def _matching_insert_positions(candidate: str, observed: str) -> list[int]:
    return [p for p in range(len(observed))
            if candidate[:p] + observed[p] + candidate[p:] == observed]


def _matching_delete_positions(candidate: str, observed: str) -> list[int]:
    return [p for p in range(len(candidate))
            if candidate[:p] + candidate[p + 1:] == observed]


def channel_probability(candidate: str, observed: str, stats: TypoStats,
                        mean_edits: float = 1.0, max_edits: int = 3) -> float:
    """P(observed | candidate) under the calibrated edit-count law."""
    law = edit_count_law(mean_edits, max_edits)
    if candidate == observed:
        return law.pmf(0)
    return law.pmf(1) * _edit_path_mass(candidate, observed, stats)


# ---------------------------------------------------------------------------
# Correction

@dataclass(frozen=True)
class CorrectorConfig:
    candidate_cap: int = 50_000
    identity_evidence_mass: float = 1e-4  # prior floor for the input itself
    mean_typos_per_record: float = 1.0
    max_typos_per_record: int = 3


DEFAULT_CONFIG = CorrectorConfig()


@dataclass(frozen=True)
class Correction:
    output: str
    confidence: float
    corrected: bool


@dataclass(frozen=True)
class ScoredInput:
    """Posterior over the scored candidate set, before thresholding."""

    query: str
    posteriors: dict[str, float]
    best: str
    best_posterior: float

    def identity_posterior(self) -> float:
        return self.posteriors[self.query]

    def decide(self, threshold: float) -> Correction:
        if self.best == self.query or self.best_posterior < threshold:
            return Correction(self.query, self.identity_posterior(), False)
        return Correction(self.best, self.best_posterior, True)


def score_input(query: str, lm: LanguageModel, stats: TypoStats,
                config: CorrectorConfig = DEFAULT_CONFIG) -> ScoredInput:
    """Posterior over {input} ∪ {seen candidates within distance 1}.

    Unseen candidates carry only smoothing mass and cannot win; pruning
    them keeps the normalization over strings with actual evidence.
    """
    law = edit_count_law(config.mean_typos_per_record,
                         config.max_typos_per_record)
    pool = candidates(query, lm, max_edits=1, cap=config.candidate_cap)
    scored: dict[str, float] = {}
    for cand in pool:
        if cand == query:
            prior = max(lm.probability(query), config.identity_evidence_mass)
            scored[cand] = prior * law.pmf(0)
        elif lm.line_counts.get(cand, 0) > 0:
            mass = _edit_path_mass(cand, query, stats)
            if mass > 0.0:
                scored[cand] = lm.probability(cand) * law.pmf(1) * mass
    total = sum(scored.values())
    posteriors = {c: s / total for c, s in scored.items()}
    best = min(posteriors,
               key=lambda c: (-posteriors[c], -lm.line_counts.get(c, 0), c))
    return ScoredInput(query, posteriors, best, posteriors[best])


def correct(query: str, lm: LanguageModel, stats: TypoStats,
            threshold: float = 0.5,
            config: CorrectorConfig = DEFAULT_CONFIG) -> Correction:
    """Best-posterior correction; falls back to the input when the input
    wins outright or the winner's confidence is below `threshold`."""
    return score_input(query, lm, stats, config).decide(threshold)


# ---------------------------------------------------------------------------
# Persistence

def save_model(lm: LanguageModel, path: str | Path,
               extra_meta: dict | None = None) -> None:
    payload = {
        "version": MODEL_VERSION,
        "smoothing_mass": lm.smoothing_mass,
        "total_lines": lm.total_lines,
        "total_tokens": lm.total_tokens,
        "line_counts": dict(lm.line_counts),
        "token_counts": dict(lm.token_counts),
    }
    if extra_meta:
        payload["_meta"] = extra_meta
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, sort_keys=True)
        fh.write("\n")


def load_model(path: str | Path) -> LanguageModel:
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CorrectorError(f"cannot read model {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("version") != MODEL_VERSION:
        raise CorrectorError(
            f"{path}: expected model version {MODEL_VERSION}")
    try:
        return LanguageModel(
            line_counts=Counter(payload["line_counts"]),
            token_counts=Counter(payload["token_counts"]),
            total_lines=int(payload["total_lines"]),
            total_tokens=int(payload["total_tokens"]),
            smoothing_mass=float(payload["smoothing_mass"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise CorrectorError(f"{path}: malformed model file: {exc}") from exc
