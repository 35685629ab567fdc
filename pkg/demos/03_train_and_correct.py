"""
Training the statistical corrector and reading its confidences
==============================================================

A noisy-channel corrector needs two ingredients: a unigram prior over
correct strings (popularity matters — a flat prior corrects nothing) and
the channel statistics describing how typos distort strings. Both come
straight out of the generation pipeline.
"""

import numpy as np

from typosmith.corrector import correct, score_input, train
from typosmith.evaluation import evaluate, format_report_table
from typosmith.generator import GenerationConfig, corrupt_corpus
from typosmith.mining import TypoPair
from typosmith.resources import default_stats_path, load_wordlist
from typosmith.stats import load_stats

stats = load_stats(default_stats_path())

# Zipf-ish corpus: head words dominate, exactly like query logs
vocab = [w for w in load_wordlist() if len(w) >= 5][:800]
weights = 1.0 / np.arange(1, len(vocab) + 1)
weights /= weights.sum()
rng = np.random.default_rng(1)
corpus = [vocab[i] for i in rng.choice(len(vocab), size=20_000, p=weights)]
lm = train(corpus)
print(f"unigram model over {len(lm.line_counts)} distinct strings")

from typosmith.generator import generate_typo

head = vocab[0]
typo, _ = generate_typo(head, stats, np.random.default_rng(3))
scored = score_input(typo, lm, stats)
print(f"\ninput {scored.query!r}: top posteriors")
top = sorted(scored.posteriors.items(), key=lambda kv: -kv[1])[:4]
for cand, p in top:
    print(f"  {cand:<14} {p:.4f}")
decision = scored.decide(0.5)
print(f"decision at threshold 0.5: {decision.output!r} "
      f"(confidence {decision.confidence:.3f}, corrected={decision.corrected})")

# niche strings stay put: the typed input is its own evidence
for query in ("qzkrv", vocab[-1]):
    result = correct(query, lm, stats, 0.5)
    print(f"  {query!r} -> {result.output!r} (corrected={result.corrected})")

# held-out realistic typos, Typos/Identity accuracy as a table
eval_src = [vocab[i] for i in rng.choice(len(vocab), size=2_000, p=weights)]
pairs = [TypoPair(t, o) for t, o, _ in
         corrupt_corpus(eval_src, stats, GenerationConfig(seed=9))
         if t != o]
report = evaluate(lambda q: correct(q, lm, stats, 0.5).output, pairs)
print()
print(format_report_table({"noisy-channel": report}), end="")
