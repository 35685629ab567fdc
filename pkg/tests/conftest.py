"""Shared fixtures: the bundled word list, synthetic stats with known truth
values for closed-loop recovery, and a single-edit pair sampler."""

import numpy as np
import pytest

from typosmith.editdist import EditKind
from typosmith.resources import load_wordlist
from typosmith.stats import N_POSITION_BINS, TypoStats


@pytest.fixture(scope="session")
def word_list():
    words = load_wordlist()
    assert len(words) == 10_000
    return words


def make_synthetic_stats() -> TypoStats:
    """Stats with hand-chosen truth values used by recovery tests.

    Confusion rows cover the eight most frequent word-list letters so each
    row collects thousands of samples in a 200K-generation closed loop.
    """
    type_freq = {
        EditKind.INSERTION: 0.30,
        EditKind.SUBSTITUTION: 0.40,
        EditKind.DELETION: 0.17,
        EditKind.TRANSPOSITION: 0.13,
    }
    confusion = {
        "a": {"q": 0.5, "s": 0.3, "z": 0.2},
        "e": {"w": 0.45, "r": 0.35, "d": 0.2},
        "i": {"u": 0.4, "o": 0.35, "k": 0.25},
        "n": {"b": 0.5, "m": 0.3, "h": 0.2},
        "o": {"i": 0.45, "p": 0.3, "l": 0.25},
        "r": {"e": 0.4, "t": 0.4, "f": 0.2},
        "s": {"a": 0.35, "d": 0.35, "w": 0.3},
        "t": {"r": 0.45, "y": 0.35, "g": 0.2},
    }
    # mild skew toward string end, mass everywhere
    raw = np.linspace(0.6, 1.4, N_POSITION_BINS)
    cdf = np.cumsum(raw) / raw.sum()
    cdf[-1] = 1.0
    stats = TypoStats(type_freq=type_freq, confusion=confusion,
                      position_cdf=cdf, sample_count=0)
    stats.validate()
    return stats


@pytest.fixture(scope="session")
def synthetic_stats():
    return make_synthetic_stats()


def sample_single_edit_pair(word: str, rng: np.random.Generator,
                            alphabet: str = "abcdefghijklmnopqrstuvwxyz"):
    """Draw one random single edit; returns (typo, word).

    Used to build pair corpora with known composition for extraction and
    merge tests. Retries until the typo differs from the word.
    """
    while True:
        kind = rng.integers(4)
        if kind == 0:  # insertion
            p = int(rng.integers(len(word) + 1))
            ch = alphabet[rng.integers(len(alphabet))]
            typo = word[:p] + ch + word[p:]
        elif kind == 1:  # deletion
            p = int(rng.integers(len(word)))
            typo = word[:p] + word[p + 1:]
        elif kind == 2:  # substitution
            p = int(rng.integers(len(word)))
            ch = alphabet[rng.integers(len(alphabet))]
            typo = word[:p] + ch + word[p + 1:]
        else:  # transposition
            if len(word) < 2:
                continue
            p = int(rng.integers(len(word) - 1))
            typo = word[:p] + word[p + 1] + word[p] + word[p + 2:]
        if typo != word:
            return typo, word
