"""Distilled typo statistics: edit-kind frequencies, a character confusion
matrix built from substitution pairs, and a percentile CDF of where in the
string typos land.

Positions are normalized by the length of the correct string (first
divergence / len), clamped into [0, 1), and histogrammed into 100
percentile bins. All probability rows must sum to 1 within 1e-9 and the
CDF must be monotone and end at 1; loaders reject files that violate this.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Tuple

import numpy as np

from .editdist import EditKind, classify_single_edit, first_divergence_position

STATS_VERSION = 1
N_POSITION_BINS = 100
PROB_TOL = 1e-9

KIND_ORDER = (EditKind.INSERTION, EditKind.SUBSTITUTION,
              EditKind.DELETION, EditKind.TRANSPOSITION)


class StatsError(ValueError):
    """Raised for malformed or inconsistent statistics."""


@dataclass
class TypoCounts:
    """Raw counts from one shard of pairs; shards merge by addition."""

    version: int = STATS_VERSION
    type_counts: Counter = field(default_factory=Counter)
    confusion_counts: Dict[str, Counter] = field(default_factory=dict)
    position_hist: List[int] = field(
        default_factory=lambda: [0] * N_POSITION_BINS)
    sample_count: int = 0

    def update(self, typo: str, correct: str) -> None:
        """Fold one (typo, correct) pair, at OSA distance exactly 1, in."""
        edit = classify_single_edit(correct, typo)
        self.type_counts[edit.kind] += 1
        if edit.kind is EditKind.SUBSTITUTION:
            old, new = edit.chars
            self.confusion_counts.setdefault(old, Counter())[new] += 1
        pos = first_divergence_position(correct, typo) / len(correct)
        bin_ = min(int(pos * N_POSITION_BINS), N_POSITION_BINS - 1)
        self.position_hist[bin_] += 1
        self.sample_count += 1


@dataclass(eq=False)
class TypoStats:
    """Normalized typo statistics.

    type_freq maps each EditKind to its probability; confusion maps a
    correct character to a distribution over typed characters (substitution
    pairs only, no self-loops); position_cdf[p] is the probability that a
    typo occurs within the first (p+1)% of the string.
    """

    type_freq: Dict[EditKind, float]
    confusion: Dict[str, Dict[str, float]]
    position_cdf: np.ndarray
    sample_count: int = 0
    _pmf_cache: Dict[int, np.ndarray] = field(
        default_factory=dict, repr=False)

    def position_pmf(self, length: int) -> np.ndarray:
        cached = self._pmf_cache.get(length)
        if cached is None:
            cached = self._pmf_cache[length] = _pmf_for_length(
                self.position_cdf, length)
        return cached

    def validate(self) -> None:
        missing = [k for k in KIND_ORDER if k not in self.type_freq]
        if missing:
            raise StatsError(f"type_freq missing kinds: {missing}")
        total = sum(self.type_freq.values())
        if abs(total - 1.0) > PROB_TOL:
            raise StatsError(f"type_freq sums to {total!r}, not 1")
        if any(p < 0 for p in self.type_freq.values()):
            raise StatsError("negative type frequency")
        for old, row in self.confusion.items():
            if not row:
                raise StatsError(f"empty confusion row for {old!r}")
            if old in row:
                raise StatsError(f"confusion self-loop on {old!r}")
            row_sum = sum(row.values())
            if abs(row_sum - 1.0) > PROB_TOL:
                raise StatsError(
                    f"confusion row {old!r} sums to {row_sum!r}, not 1")
            if any(p < 0 for p in row.values()):
                raise StatsError(f"negative probability in row {old!r}")
        cdf = self.position_cdf
        if len(cdf) != N_POSITION_BINS:
            raise StatsError(f"position_cdf has {len(cdf)} bins, "
                             f"expected {N_POSITION_BINS}")
        if np.any(np.diff(cdf) < 0) or cdf[0] < 0:
            raise StatsError("position_cdf is not monotone non-decreasing")
        if abs(cdf[-1] - 1.0) > PROB_TOL:
            raise StatsError(f"position_cdf ends at {cdf[-1]!r}, not 1")
        if self.sample_count < 0:
            raise StatsError("negative sample_count")


def _pmf_for_length(cdf: np.ndarray, length: int) -> np.ndarray:
    """Map the percentile CDF onto a per-character PMF for one length.

    Character i receives the CDF mass of the interval (i/length,
    (i+1)/length]; mass inside a percentile bin spreads uniformly (linear
    interpolation between the percentile knots).
    """
    if length < 1:
        raise StatsError(f"length must be >= 1, got {length}")
    knots_x = np.linspace(0.0, 1.0, N_POSITION_BINS + 1)
    knots_y = np.concatenate(([0.0], np.asarray(cdf, dtype=float)))
    edges = np.linspace(0.0, 1.0, length + 1)
    cum = np.interp(edges, knots_x, knots_y)
    pmf = np.diff(cum)
    # guard against negative float dust on flat CDF stretches
    np.clip(pmf, 0.0, None, out=pmf)
    return pmf


def position_pmf_for_length(stats: TypoStats, length: int) -> np.ndarray:
    """Per-character typo-position PMF for strings of the given length."""
    return stats.position_pmf(length)


def extract_counts(pairs: Iterable[Tuple[str, str]]) -> TypoCounts:
    """Count edit kinds, substitution confusions and positions.

    ``pairs`` yields (typo, correct) tuples at OSA distance exactly 1;
    anything else raises.
    """
    counts = TypoCounts()
    for typo, correct in pairs:
        counts.update(typo, correct)
    return counts


def merge_stats(a: TypoCounts, b: TypoCounts) -> TypoCounts:
    """Merge two shards of counts; versions must agree."""
    if a.version != b.version:
        raise StatsError(
            f"cannot merge counts of versions {a.version} and {b.version}")
    merged = TypoCounts(version=a.version)
    merged.type_counts = a.type_counts + b.type_counts
    for src in (a, b):
        for old, row in src.confusion_counts.items():
            tgt = merged.confusion_counts.setdefault(old, Counter())
            tgt.update(row)
    merged.position_hist = [x + y for x, y
                            in zip(a.position_hist, b.position_hist)]
    merged.sample_count = a.sample_count + b.sample_count
    return merged


def finalize_stats(counts: TypoCounts) -> TypoStats:
    """Normalize counts into probability tables."""
    if counts.sample_count == 0:
        raise StatsError("cannot finalize stats from an empty corpus")
    n = counts.sample_count
    type_freq = {k: counts.type_counts.get(k, 0) / n for k in KIND_ORDER}
    confusion = {}
    for old, row in sorted(counts.confusion_counts.items()):
        row_total = sum(row.values())
        confusion[old] = {ch: c / row_total for ch, c in sorted(row.items())}
    hist = np.asarray(counts.position_hist, dtype=float)
    cdf = np.cumsum(hist) / hist.sum()
    np.clip(cdf, 0.0, 1.0, out=cdf)  # keep monotone after float division
    cdf[-1] = 1.0
    stats = TypoStats(type_freq=type_freq, confusion=confusion,
                      position_cdf=cdf, sample_count=n)
    stats.validate()
    return stats


def extract_stats(pairs: Iterable[Tuple[str, str]]) -> TypoStats:
    """Distill normalized typo statistics from single-edit pairs."""
    return finalize_stats(extract_counts(pairs))


def uniform_position_cdf() -> np.ndarray:
    return np.linspace(1.0 / N_POSITION_BINS, 1.0, N_POSITION_BINS)


def uniform_stats(alphabet: str) -> TypoStats:
    """Maximum-entropy stats: uniform kinds, positions and characters.

    Confusion rows cover every alphabet character minus the row key.
    """
    chars = sorted(set(alphabet))
    if len(chars) < 2:
        raise StatsError("uniform stats need an alphabet of >= 2 characters")
    type_freq = {k: 1.0 / len(KIND_ORDER) for k in KIND_ORDER}
    confusion = {}
    for old in chars:
        others = [c for c in chars if c != old]
        confusion[old] = {c: 1.0 / len(others) for c in others}
    stats = TypoStats(type_freq=type_freq, confusion=confusion,
                      position_cdf=uniform_position_cdf(), sample_count=0)
    stats.validate()
    return stats


# ---------------------------------------------------------------------------
# serialization

def stats_to_dict(stats: TypoStats) -> dict:
    return {
        "version": STATS_VERSION,
        "sample_count": stats.sample_count,
        "type_freq": {k.value: stats.type_freq[k] for k in KIND_ORDER},
        "confusion": {old: dict(sorted(row.items()))
                      for old, row in sorted(stats.confusion.items())},
        "position_cdf": [float(x) for x in stats.position_cdf],
    }


def stats_from_dict(doc: dict) -> TypoStats:
    try:
        version = doc["version"]
        if version != STATS_VERSION:
            raise StatsError(f"unsupported stats version {version!r}")
        type_freq = {EditKind(k): float(v)
                     for k, v in doc["type_freq"].items()}
        confusion = {old: {ch: float(p) for ch, p in row.items()}
                     for old, row in doc["confusion"].items()}
        cdf = np.asarray(doc["position_cdf"], dtype=float)
        stats = TypoStats(type_freq=type_freq, confusion=confusion,
                          position_cdf=cdf,
                          sample_count=int(doc.get("sample_count", 0)))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, StatsError):
            raise
        raise StatsError(f"malformed stats document: {exc}") from exc
    stats.validate()
    return stats


def save_stats(stats: TypoStats, path, extra_meta: dict = None) -> None:
    doc = stats_to_dict(stats)
    if extra_meta:
        doc["_meta"] = extra_meta
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False, indent=1)
        fh.write("\n")


def load_stats(path) -> TypoStats:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise StatsError(f"stats file is not valid JSON: {exc}") from exc
    return stats_from_dict(doc)
