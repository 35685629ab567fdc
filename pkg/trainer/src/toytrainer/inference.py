"""Beam-search decoding with the beam score as a confidence.

The beam score of the winning hypothesis — the product of its token
probabilities — is reported as the confidence of the correction, and a
serving threshold suppresses low-confidence outputs: below it, the
input passes through unchanged.  A threshold above 1.0 therefore turns
the model off entirely, because a sequence probability can never exceed
one.  Inputs at or beyond the 20-character serving cap are never
touched at all, matching the serving contract of the statistical
corrector this trainer sits beside.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import torch

from .model import DenoiserModel
from .vocab import BOS_ID, EOS_ID, SubwordVocab

MAX_INPUT_LENGTH = 20  # characters; at or past this, inputs pass through
MAX_DECODE_TOKENS = 40  # absolute stop for the decoder loop


class Correction(NamedTuple):
    output: str
    confidence: float
    corrected: bool


class ScoredCandidate(NamedTuple):
    """The model's best hypothesis for one input, before thresholding."""

    query: str
    output: str
    confidence: float

    def decide(self, threshold: float) -> Correction:
        if self.output == self.query or self.confidence < threshold:
            return Correction(self.query, self.confidence, False)
        return Correction(self.output, self.confidence, True)


class _Beam(NamedTuple):
    ids: tuple[int, ...]
    score: float  # sum of token log-probabilities
    finished: bool


def beam_search(model: DenoiserModel, src_ids: list[int], beam_size: int,
                max_tokens: int | None = None) -> tuple[list[int], float]:
    """Decode `src_ids`; returns (output ids, sequence probability).

    Classic batch-of-beams expansion: every live beam proposes its
    `beam_size` best continuations, the pool (plus already-finished
    beams) is pruned back to `beam_size` by score.  No length penalty —
    the raw sequence probability is the confidence.
    """
    if max_tokens is None:
        max_tokens = min(len(src_ids) + 8, MAX_DECODE_TOKENS)
    model.eval()
    with torch.no_grad():
        src = torch.tensor([src_ids], dtype=torch.long)
        memory, src_pad = model.encode(src)
        beams = [_Beam((BOS_ID,), 0.0, False)]
        for _ in range(max_tokens):
            live = [b for b in beams if not b.finished]
            if not live:
                break
            tgt = torch.tensor([b.ids for b in live], dtype=torch.long)
            logits = model.decode(tgt, memory.expand(len(live), -1, -1),
                                  src_pad.expand(len(live), -1))
            logprobs = torch.log_softmax(logits[:, -1, :], dim=-1)
            top = logprobs.topk(beam_size, dim=-1)
            pool = [b for b in beams if b.finished]
            for row, beam in enumerate(live):
                for lp, tok in zip(top.values[row].tolist(),
                                   top.indices[row].tolist()):
                    pool.append(_Beam(beam.ids + (tok,), beam.score + lp,
                                      tok == EOS_ID))
            pool.sort(key=lambda b: b.score, reverse=True)
            beams = pool[:beam_size]
    best = max(beams, key=lambda b: b.score)
    out = [t for t in best.ids[1:] if t != EOS_ID]
    return out, math.exp(best.score)


def score_input(model: DenoiserModel, vocab: SubwordVocab, text: str,
                beam_size: int | None = None) -> ScoredCandidate:
    """Run the model on `text` and return its best hypothesis."""
    if beam_size is None:
        beam_size = model.config.beam_size
    src_ids = vocab.encode(text)
    if not src_ids:
        return ScoredCandidate(text, text, 1.0)
    out_ids, confidence = beam_search(model, src_ids, beam_size)
    return ScoredCandidate(text, vocab.decode(out_ids), confidence)


def predict(model: DenoiserModel, vocab: SubwordVocab, text: str,
            threshold: float | None = None,
            beam_size: int | None = None) -> Correction:
    """Correct `text`, or pass it through below `threshold` or at the
    length cap.  Defaults come from the model's training config."""
    if threshold is None:
        threshold = model.config.confidence_threshold
    if len(text) >= MAX_INPUT_LENGTH:
        return Correction(text, 1.0, False)
    return score_input(model, vocab, text, beam_size).decide(threshold)


def predict_lines(model: DenoiserModel, vocab: SubwordVocab,
                  queries: list[str], threshold: float | None = None,
                  ) -> list[Correction]:
    return [predict(model, vocab, q, threshold) for q in queries]


def format_prediction(correction: Correction) -> str:
    """One TSV line: output, confidence, corrected flag — the same
    layout the statistical corrector emits, so its evaluator's
    predictions mode can read the first column directly."""
    flag = "true" if correction.corrected else "false"
    return f"{correction.output}\t{correction.confidence:.6f}\t{flag}"
