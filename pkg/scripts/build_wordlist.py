#!/usr/bin/env python3
"""Build the bundled deterministic pseudo-English word list.

The sandbox has no system dictionary and no general network access, so the
fixtures use synthetic words instead: syllable-built, letter-frequency
weighted, 10K unique words of length 5-12. Regenerating always produces the
same file (fixed seed, no environment entropy).
"""

import collections
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / \
    "src" / "typosmith" / "data" / "wordlists" / "pseudo-english-10k.txt"

# rough English-like letter weights; keeps common letters common so that
# confusion rows over {a,e,i,o,r,s,t,n} get dense samples in closed loops
ONSETS = ["b", "c", "d", "f", "g", "h", "j", "k", "l", "m", "n", "p", "r",
          "s", "t", "v", "w", "st", "tr", "br", "cr", "ch", "sh", "th",
          "pr", "pl", "cl", "sl", "sp"]
ONSET_W = [2, 3, 3, 2, 2, 2, 1, 1, 3, 3, 4, 2, 4, 4, 4, 1, 1,
           2, 2, 1, 1, 2, 2, 2, 1, 1, 1, 1, 1]
VOWELS = ["a", "e", "i", "o", "u", "ea", "ou", "ai", "ee", "io"]
VOWEL_W = [5, 6, 4, 4, 2, 1, 1, 1, 1, 1]
CODAS = ["", "n", "r", "s", "t", "l", "d", "st", "nt", "rs", "ns"]
CODA_W = [4, 3, 3, 3, 3, 2, 2, 1, 1, 1, 1]


def _norm(w):
    w = np.asarray(w, dtype=float)
    return w / w.sum()


def build(n_words=10_000, seed=20_260_823):
    rng = np.random.default_rng(seed)
    onset_p, vowel_p, coda_p = _norm(ONSET_W), _norm(VOWEL_W), _norm(CODA_W)
    words = []
    seen = set()
    while len(words) < n_words:
        n_syll = rng.integers(2, 5)
        parts = []
        for _ in range(n_syll):
            parts.append(ONSETS[rng.choice(len(ONSETS), p=onset_p)])
            parts.append(VOWELS[rng.choice(len(VOWELS), p=vowel_p)])
            parts.append(CODAS[rng.choice(len(CODAS), p=coda_p)])
        word = "".join(parts)
        if 5 <= len(word) <= 12 and word not in seen:
            seen.add(word)
            words.append(word)
    return words


def main():
    words = build()
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text("\n".join(words) + "\n", encoding="utf-8")
    letters = collections.Counter("".join(words))
    total = sum(letters.values())
    top = ", ".join(f"{ch}:{c / total:.3f}" for ch, c in letters.most_common(8))
    print(f"wrote {len(words)} words to {OUT}")
    print(f"top letters: {top}")


if __name__ == "__main__":
    main()
