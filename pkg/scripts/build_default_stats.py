#!/usr/bin/env python3
"""Build the bundled default English typo statistics file.

The file is synthesized, not mined: substitution confusion rows come from
physical QWERTY key adjacency (immediate neighbors weighted over diagonal
ones), and the position curve is a Beta(2.2, 1.3) CDF, skewed toward the
end of the string where real typos concentrate. The four edit-kind
frequencies follow the widely reported proportions for search-query typos
(substitution > insertion > deletion > transposition). Deterministic: no
RNG, rerunning reproduces the file byte for byte.
"""

from pathlib import Path

import numpy as np
from scipy.special import betainc

import sys
sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from typosmith.editdist import EditKind  # noqa: E402
from typosmith.stats import (  # noqa: E402
    N_POSITION_BINS, TypoStats, save_stats)

OUT = Path(__file__).resolve().parents[1] / \
    "src" / "typosmith" / "data" / "stats" / "english-default.json"

TYPE_FREQ = {
    EditKind.INSERTION: 0.3274,
    EditKind.SUBSTITUTION: 0.3880,
    EditKind.DELETION: 0.1767,
    EditKind.TRANSPOSITION: 0.1079,
}

QWERTY_ROWS = ["qwertyuiop", "asdfghjkl", "zxcvbnm"]
ROW_OFFSET = [0.0, 0.25, 0.75]  # horizontal stagger in key widths

# Hitting the same key twice is an insertion, not a substitution, so rows
# carry no self mass and stay self-loop-free by construction.
DIRECT_W = 3.0    # horizontally adjacent key
DIAGONAL_W = 1.5  # vertically / diagonally adjacent key


def key_positions():
    pos = {}
    for r, row in enumerate(QWERTY_ROWS):
        for c, ch in enumerate(row):
            pos[ch] = (float(r), c + ROW_OFFSET[r])
    return pos


def build_confusion():
    pos = key_positions()
    confusion = {}
    for ch, (r, c) in pos.items():
        weights = {}
        for other, (r2, c2) in pos.items():
            if other == ch:
                continue
            dr, dc = abs(r - r2), abs(c - c2)
            if dr == 0 and dc == 1:
                weights[other] = DIRECT_W
            elif dr == 1 and dc <= 1:
                weights[other] = DIAGONAL_W
        total = sum(weights.values())
        confusion[ch] = {o: w / total for o, w in sorted(weights.items())}
    return confusion


def build_position_cdf(alpha=2.2, beta=1.3):
    edges = np.linspace(0.0, 1.0, N_POSITION_BINS + 1)[1:]
    cdf = betainc(alpha, beta, edges)
    cdf[-1] = 1.0
    return cdf


def main():
    stats = TypoStats(type_freq=TYPE_FREQ, confusion=build_confusion(),
                      position_cdf=build_position_cdf(), sample_count=0)
    stats.validate()
    OUT.parent.mkdir(parents=True, exist_ok=True)
    save_stats(stats, OUT, extra_meta={
        "source": "synthesized",
        "notes": ("Confusion rows derive from physical QWERTY adjacency; "
                  "position curve is a Beta(2.2, 1.3) CDF skewed toward "
                  "string end; type frequencies follow commonly reported "
                  "search-typo proportions. Not fitted to mined data. "
                  "Rebuild with scripts/build_default_stats.py."),
    })
    mean_pos = float(np.sum(
        (np.arange(N_POSITION_BINS) + 0.5) / N_POSITION_BINS
        * np.diff(np.concatenate(([0.0], stats.position_cdf)))))
    print(f"wrote {OUT}")
    print(f"confusion rows: {len(stats.confusion)}, "
          f"mean normalized position: {mean_pos:.3f}")


if __name__ == "__main__":
    main()
