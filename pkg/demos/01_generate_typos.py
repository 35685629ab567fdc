"""
Generating realistic typos from bundled error statistics
========================================================

Corrupt a few words with the bundled English error model, then contrast
with uniform corruption and watch the edit-kind tallies converge to the
configured frequencies.
"""

from collections import Counter

import numpy as np

from typosmith.generator import (GenerationConfig, UNIFORM, corrupt_corpus,
                                 generate_typo)
from typosmith.resources import default_stats_path, load_wordlist
from typosmith.stats import load_stats

stats = load_stats(default_stats_path())
print("edit-kind frequencies of the bundled model:")
for kind, freq in stats.type_freq.items():
    print(f"  {kind.value:<13} {freq:.4f}")

# one realistic edit per word, fixed stream
rng = np.random.default_rng(42)
words = ["jessica", "hubcompany", "marketing", "dashboard", "pipeline"]
print("\nsingle realistic edits:")
for word in words:
    typo, log = generate_typo(word, stats, rng)
    entry = log.entries[0]
    print(f"  {word:<12} -> {typo:<13} ({entry.kind.value} at {entry.position})")

# whole-corpus corruption draws the edit count per line from a truncated
# Poisson law calibrated so the mean equals the configured value (1.0);
# ~35% of lines come back unchanged (k = 0)
corpus = load_wordlist()  # 10K pseudo-English words
config = GenerationConfig(seed=7)
kinds = Counter()
unchanged = 0
for typo, original, log in corrupt_corpus(corpus, stats, config):
    unchanged += typo == original
    for entry in log.entries:
        kinds[entry.kind] += 1
total = sum(kinds.values())
print(f"\n{len(corpus)} corrupted lines, {unchanged} unchanged "
      f"({unchanged / len(corpus):.1%})")
print("empirical kind mix vs configured:")
for kind, freq in stats.type_freq.items():
    print(f"  {kind.value:<13} {kinds[kind] / total:.4f}  (model {freq:.4f})")

# the uniform ("Base") generator ignores the statistics entirely —
# all kinds, positions and characters equally likely
base_config = GenerationConfig(mode=UNIFORM, seed=7)
base_kinds = Counter()
for typo, original, log in corrupt_corpus(corpus, None, base_config):
    for entry in log.entries:
        base_kinds[entry.kind] += 1
base_total = sum(base_kinds.values())
print("\nuniform generation kind mix (flat by construction):")
for kind in stats.type_freq:
    print(f"  {kind.value:<13} {base_kinds[kind] / base_total:.4f}")
