"""Build the training fixture by driving the typosmith CLI.

Everything the trainer consumes is produced here the same way a user
would produce it: a synthetic Zipf-weighted corpus over a 200-word
vocabulary is corrupted by `typosmith gen` (once with a hand-written
skewed stats file — the "Real" dataset — and once with `--uniform` —
the "Base" dataset), tokenized by `bpe-fit`/`bpe-encode`, and split
100:1:1 by `split`.  A third dataset of untouched identity pairs
exercises the pure copy task.  The stats file is written directly in
the documented JSON schema; its confusion rows are deliberately
concentrated (0.7/0.3 on two neighbours per character) so realistic
and uniform noise are far apart.
"""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path
from types import SimpleNamespace

import numpy as np

ALPHABET = "abcdefghijklmnopqrstuvwxyz"
WORD_COUNT = 200
CORPUS_DRAWS = 50_000  # the 50K-pair fixture
EVAL_TYPOS = 1200
EVAL_IDENTITY = 1200
BPE_TARGET = 220
SPLIT_SEED = 904


def run_typosmith(*argv: str) -> str:
    """Run a typosmith subcommand; fail loudly with its stderr."""
    proc = subprocess.run([sys.executable, "-m", "typosmith", *argv],
                          capture_output=True, text=True)
    if proc.returncode != 0:
        raise AssertionError(
            f"typosmith {argv[0]} failed:\n{proc.stderr}")
    return proc.stdout


def make_words(seed: int, count: int = WORD_COUNT) -> list[str]:
    """Distinct lowercase words, 4-9 characters."""
    rng = np.random.default_rng(seed)
    words: list[str] = []
    seen: set[str] = set()
    while len(words) < count:
        length = int(rng.integers(4, 10))
        word = "".join(ALPHABET[i] for i in rng.integers(0, 26, length))
        if word not in seen:
            seen.add(word)
            words.append(word)
    return words


def zipf_draw(words: list[str], n: int, seed: int) -> list[str]:
    """n draws with probability proportional to 1/rank."""
    weights = 1.0 / np.arange(1, len(words) + 1)
    weights /= weights.sum()
    rng = np.random.default_rng(seed)
    return [words[i] for i in rng.choice(len(words), size=n, p=weights)]


def skewed_stats_doc() -> dict:
    """A valid stats document with concentrated confusion rows: each
    letter confuses into its alphabet neighbour (0.7) or the letter
    seven places on (0.3); edit positions skew towards word ends."""
    n = len(ALPHABET)
    confusion = {}
    for i, ch in enumerate(ALPHABET):
        nxt = ALPHABET[(i + 1) % n]
        alt = ALPHABET[(i + 7) % n]
        confusion[ch] = {nxt: 0.7, alt: 0.3}
    cdf = [((j + 1) / 100.0) ** 1.6 for j in range(100)]
    cdf[-1] = 1.0
    return {
        "version": 1,
        "sample_count": 50_000,
        "type_freq": {"insertion": 0.20, "substitution": 0.55,
                      "deletion": 0.15, "transposition": 0.10},
        "confusion": confusion,
        "position_cdf": cdf,
    }


def read_pairs_tsv(path: Path) -> list[tuple[str, str]]:
    pairs = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line or line.startswith("#"):
            continue
        typo, correct = line.split("\t")
        pairs.append((typo, correct))
    return pairs


def model_accuracy(model, vocab, pairs, threshold: float = 0.5) -> float:
    """Fraction of (input, expected) pairs the model gets right at
    `threshold`; below-threshold predictions count as the input."""
    from toytrainer import predict
    good = sum(predict(model, vocab, given, threshold).output == expected
               for given, expected in pairs)
    return good / len(pairs)


def _encode_and_split(root: Path, name: str) -> None:
    run_typosmith("bpe-encode", "--vocab", str(root / "merges.txt"),
                  "--tokens", str(root / "tokens.txt"),
                  "--pairs", str(root / f"{name}_pairs.tsv"),
                  "--out-ids", str(root / f"{name}_ids.tsv"))
    run_typosmith("split", "--input", str(root / f"{name}_ids.tsv"),
                  "--seed", str(SPLIT_SEED),
                  "--out-train", str(root / f"{name}_train.tsv"),
                  "--out-valid", str(root / f"{name}_valid.tsv"),
                  "--out-test", str(root / f"{name}_test.tsv"))


def build_workspace(root: Path) -> SimpleNamespace:
    """Create every fixture file under `root`; see module docstring."""
    root.mkdir(parents=True, exist_ok=True)
    words = make_words(900)
    corpus = zipf_draw(words, CORPUS_DRAWS, 901)
    (root / "corpus.txt").write_text("\n".join(corpus) + "\n",
                                     encoding="utf-8")
    (root / "stats.json").write_text(
        json.dumps(skewed_stats_doc(), indent=1), encoding="utf-8")

    run_typosmith("gen", "--corpus", str(root / "corpus.txt"),
                  "--stats", str(root / "stats.json"), "--seed", "902",
                  "--out", str(root / "real_pairs.tsv"))
    run_typosmith("gen", "--corpus", str(root / "corpus.txt"),
                  "--uniform", "--alphabet", ALPHABET, "--seed", "903",
                  "--out", str(root / "base_pairs.tsv"))
    # The copy task wants every word learned equally well, so identity
    # pairs cycle the word list instead of following the Zipf draws.
    with open(root / "identity_pairs.tsv", "w", encoding="utf-8") as fh:
        for i in range(CORPUS_DRAWS):
            word = words[i % len(words)]
            fh.write(f"{word}\t{word}\n")

    run_typosmith("bpe-fit", "--pairs", str(root / "real_pairs.tsv"),
                  "--target-size", str(BPE_TARGET),
                  "--out", str(root / "merges.txt"),
                  "--tokens", str(root / "tokens.txt"))
    for name in ("real", "base", "identity"):
        _encode_and_split(root, name)

    # Held-out evaluation: fresh draws, same word list and stats.
    eval_corpus = zipf_draw(words, 4_000, 905)
    (root / "eval_corpus.txt").write_text("\n".join(eval_corpus) + "\n",
                                          encoding="utf-8")
    run_typosmith("gen", "--corpus", str(root / "eval_corpus.txt"),
                  "--stats", str(root / "stats.json"), "--seed", "906",
                  "--out", str(root / "eval_gen.tsv"))
    typos = [(t, c) for t, c in read_pairs_tsv(root / "eval_gen.tsv")
             if t != c][:EVAL_TYPOS]
    with open(root / "eval_typos.tsv", "w", encoding="utf-8") as fh:
        for typo, correct in typos:
            fh.write(f"{typo}\t{correct}\n")
    identity = zipf_draw(words, EVAL_IDENTITY, 907)
    with open(root / "eval_identity.tsv", "w", encoding="utf-8") as fh:
        for word in identity:
            fh.write(f"{word}\t{word}\n")

    return SimpleNamespace(
        root=root, words=words,
        merges=root / "merges.txt", tokens=root / "tokens.txt",
        stats=root / "stats.json",
        real_pairs=root / "real_pairs.tsv",
        real_train=root / "real_train.tsv",
        real_valid=root / "real_valid.tsv",
        base_train=root / "base_train.tsv",
        base_valid=root / "base_valid.tsv",
        identity_train=root / "identity_train.tsv",
        identity_valid=root / "identity_valid.tsv",
        eval_typos=root / "eval_typos.tsv",
        eval_identity=root / "eval_identity.tsv",
    )
