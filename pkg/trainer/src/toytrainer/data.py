"""Reading and batching the emitted token-id datasets.

A dataset file is a TSV with one example per line: the noisy input's
token ids, a tab, the clean target's token ids, each column
space-joined.  Lines starting with ``#`` are provenance comments and
blank lines are padding; both are skipped.  Every id must fall inside
the vocabulary that encoded the file — an out-of-range id means the
dataset and vocab files were produced by different runs, which is
rejected up front rather than discovered as a crash mid-training.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .vocab import BOS_ID, EOS_ID, PAD_ID

IdPair = tuple[list[int], list[int]]


class DataError(ValueError):
    """Raised for unreadable files or dataset/vocab mismatches."""


def read_id_pairs(path: str | Path, vocab_size: int) -> list[IdPair]:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read dataset {path}: {exc}") from exc
    pairs: list[IdPair] = []
    for n, line in enumerate(lines, 1):
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise DataError(f"{path}:{n}: expected 'src-ids\\ttgt-ids'")
        try:
            src = [int(t) for t in fields[0].split()]
            tgt = [int(t) for t in fields[1].split()]
        except ValueError as exc:
            raise DataError(f"{path}:{n}: non-integer token id") from exc
        for i in src + tgt:
            if not 0 <= i < vocab_size:
                raise DataError(
                    f"{path}:{n}: token id {i} out of range for "
                    f"vocabulary of {vocab_size} tokens")
        if not src or not tgt:
            raise DataError(f"{path}:{n}: empty id sequence")
        pairs.append((src, tgt))
    if not pairs:
        raise DataError(f"{path}: no examples")
    return pairs


@dataclass
class Dataset:
    """Train and validation splits, already range-checked."""

    train: list[IdPair]
    valid: list[IdPair]

    @classmethod
    def load(cls, train_path: str | Path, valid_path: str | Path,
             vocab_size: int) -> "Dataset":
        return cls(read_id_pairs(train_path, vocab_size),
                   read_id_pairs(valid_path, vocab_size))


def pad_batch(pairs: list[IdPair]) -> tuple[torch.Tensor, torch.Tensor,
                                            torch.Tensor]:
    """Pack examples into (src, tgt_in, tgt_out) id tensors.

    The decoder is trained teacher-forced: it reads ``<bos> + target``
    and predicts ``target + <eos>``.  All three tensors are padded to
    the batch maximum with ``<pad>``, which the loss ignores.
    """
    src_max = max(len(s) for s, _ in pairs)
    tgt_max = max(len(t) for _, t in pairs) + 1
    src = torch.full((len(pairs), src_max), PAD_ID, dtype=torch.long)
    tgt_in = torch.full((len(pairs), tgt_max), PAD_ID, dtype=torch.long)
    tgt_out = torch.full((len(pairs), tgt_max), PAD_ID, dtype=torch.long)
    for row, (s, t) in enumerate(pairs):
        src[row, :len(s)] = torch.tensor(s, dtype=torch.long)
        tgt_in[row, 0] = BOS_ID
        tgt_in[row, 1:len(t) + 1] = torch.tensor(t, dtype=torch.long)
        tgt_out[row, :len(t)] = torch.tensor(t, dtype=torch.long)
        tgt_out[row, len(t)] = EOS_ID
    return src, tgt_in, tgt_out


def batch_stream(pairs: list[IdPair], batch_size: int,
                 rng: np.random.Generator):
    """Endless stream of shuffled batches; reshuffles every epoch."""
    if batch_size < 1:
        raise DataError(f"batch_size must be positive, got {batch_size}")
    while True:
        order = rng.permutation(len(pairs))
        for lo in range(0, len(order), batch_size):
            chunk = [pairs[i] for i in order[lo:lo + batch_size]]
            yield pad_batch(chunk)
