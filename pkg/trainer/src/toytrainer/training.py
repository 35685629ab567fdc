"""Single-process training loop with an inverse-square-root schedule.

The learning rate follows the standard transformer recipe: linear
warm-up to a peak scaled by ``hidden_size**-0.5``, then decay as
``step**-0.5``.  The full-size reference model was trained with its
library's stock warm-up/decay configuration; this trainer standardizes
on the inverse-square-root form of that family rather than reproducing
any particular library's defaults.

A completed run writes a checkpoint directory (final ``model.pt`` plus
optional step snapshots) and a ``metrics.json`` loss log.  Validation
loss is measured before the first update and after the last one; a
healthy run ends strictly below its starting loss, which the metrics
record as ``converged``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from torch import nn

from .data import Dataset, pad_batch, batch_stream
from .model import DenoiserModel, TrainerConfig, build_model
from .vocab import PAD_ID

CHECKPOINT_FORMAT = "toytrainer-checkpoint v1"


class TrainingError(ValueError):
    """Raised for invalid training inputs or unreadable checkpoints."""


def inverse_sqrt_lr(step: int, hidden_size: int,
                    warmup_steps: int) -> float:
    """Learning rate at 1-based `step`: warm up linearly, decay as
    ``step**-0.5``, everything scaled by ``hidden_size**-0.5``."""
    if step < 1:
        raise TrainingError(f"step must be >= 1, got {step}")
    return hidden_size ** -0.5 * min(step ** -0.5,
                                     step * warmup_steps ** -1.5)


@dataclass
class TrainResult:
    """What a training run produced, with the live model attached."""

    config: TrainerConfig
    vocab_size: int
    steps: int
    loss_log: list[tuple[int, float]]
    initial_validation_loss: float
    final_validation_loss: float
    checkpoint_path: Path | None
    model: DenoiserModel = field(repr=False)

    @property
    def converged(self) -> bool:
        return self.final_validation_loss < self.initial_validation_loss

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "vocab_size": self.vocab_size,
            "steps": self.steps,
            "loss_log": [[step, loss] for step, loss in self.loss_log],
            "initial_validation_loss": self.initial_validation_loss,
            "final_validation_loss": self.final_validation_loss,
            "converged": self.converged,
        }


def validation_loss(model: DenoiserModel, pairs, batch_size: int = 256,
                    ) -> float:
    """Mean cross-entropy per non-pad target token over `pairs`."""
    model.eval()
    total, count = 0.0, 0
    with torch.no_grad():
        for lo in range(0, len(pairs), batch_size):
            src, tgt_in, tgt_out = pad_batch(pairs[lo:lo + batch_size])
            logits = model(src, tgt_in)
            loss = nn.functional.cross_entropy(
                logits.reshape(-1, model.vocab_size), tgt_out.reshape(-1),
                ignore_index=PAD_ID, reduction="sum")
            total += loss.item()
            count += int(tgt_out.ne(PAD_ID).sum())
    return total / count


def train_model(dataset: Dataset, vocab_size: int, config: TrainerConfig,
                out_dir: str | Path | None = None, *,
                batch_size: int = 128, warmup_steps: int = 400,
                log_every: int = 50, checkpoint_every: int = 0,
                ) -> TrainResult:
    """Train a denoiser on `dataset` and return the result.

    If `out_dir` is given, the final checkpoint lands there as
    ``model.pt`` (plus ``step-NNNNNN.pt`` snapshots every
    `checkpoint_every` steps when requested) alongside a
    ``metrics.json`` with the loss log and validation losses.
    """
    model = build_model(vocab_size, config)
    rng = np.random.default_rng(config.seed)
    optimizer = torch.optim.Adam(model.parameters(), lr=0.0,
                                 betas=(0.9, 0.98), eps=1e-9)
    init_val = validation_loss(model, dataset.valid)

    out_path = Path(out_dir) if out_dir is not None else None
    if out_path is not None:
        out_path.mkdir(parents=True, exist_ok=True)

    loss_log: list[tuple[int, float]] = []
    stream = batch_stream(dataset.train, batch_size, rng)
    model.train()
    for step in range(1, config.steps + 1):
        lr = inverse_sqrt_lr(step, config.hidden_size, warmup_steps)
        for group in optimizer.param_groups:
            group["lr"] = lr
        src, tgt_in, tgt_out = next(stream)
        logits = model(src, tgt_in)
        loss = nn.functional.cross_entropy(
            logits.reshape(-1, vocab_size), tgt_out.reshape(-1),
            ignore_index=PAD_ID)
        optimizer.zero_grad()
        loss.backward()
        nn.utils.clip_grad_norm_(model.parameters(), 1.0)
        optimizer.step()
        value = loss.item()
        if not math.isfinite(value):
            raise TrainingError(f"loss diverged at step {step}: {value}")
        if step == 1 or step == config.steps or step % log_every == 0:
            loss_log.append((step, value))
        if (checkpoint_every and out_path is not None
                and step % checkpoint_every == 0):
            save_checkpoint(model, out_path / f"step-{step:06d}.pt")

    final_val = validation_loss(model, dataset.valid)

    checkpoint_path = None
    if out_path is not None:
        checkpoint_path = out_path / "model.pt"
        save_checkpoint(model, checkpoint_path)
    result = TrainResult(
        config=config, vocab_size=vocab_size, steps=config.steps,
        loss_log=loss_log, initial_validation_loss=init_val,
        final_validation_loss=final_val, checkpoint_path=checkpoint_path,
        model=model)
    if out_path is not None:
        with open(out_path / "metrics.json", "w", encoding="utf-8") as fh:
            json.dump(result.to_dict(), fh, indent=1)
            fh.write("\n")
    return result


def save_checkpoint(model: DenoiserModel, path: str | Path) -> None:
    torch.save({"format": CHECKPOINT_FORMAT,
                "config": model.config.to_dict(),
                "vocab_size": model.vocab_size,
                "state_dict": model.state_dict()}, path)


def load_checkpoint(path: str | Path) -> DenoiserModel:
    """Rebuild a model from a checkpoint file, in eval mode."""
    try:
        doc = torch.load(path, map_location="cpu", weights_only=True)
    except (OSError, RuntimeError) as exc:
        raise TrainingError(f"cannot read checkpoint {path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != CHECKPOINT_FORMAT:
        raise TrainingError(f"{path}: not a {CHECKPOINT_FORMAT!r} file")
    config = TrainerConfig.from_dict(doc["config"])
    model = DenoiserModel(doc["vocab_size"], config)
    model.load_state_dict(doc["state_dict"])
    model.eval()
    return model
