"""Denoising sequence-to-sequence transformer, sized for a desk.

The architecture is a plain post-norm encoder–decoder: shared input and
output embeddings, sinusoidal positions, feed-forward width fixed at
four times the hidden size.  The default configuration mirrors the
full-size reference model (4 layers, 2 heads, hidden 256 — about 10M
parameters over a 12K-token vocabulary); ``TrainerConfig.desk()``
shrinks it to something a CPU can train in minutes, which is what the
command-line interface and the test suite use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import torch
from torch import nn

from .vocab import PAD_ID


class ModelError(ValueError):
    """Raised for invalid configurations."""


@dataclass(frozen=True)
class TrainerConfig:
    """Hyper-parameters; defaults match the full-size reference model."""

    layers: int = 4
    attention_heads: int = 2
    hidden_size: int = 256
    beam_size: int = 2
    steps: int = 20_000
    confidence_threshold: float = 0.5
    seed: int = 0

    def __post_init__(self):
        for name in ("layers", "attention_heads", "hidden_size",
                     "beam_size", "steps"):
            if getattr(self, name) < 1:
                raise ModelError(f"{name} must be positive, "
                                 f"got {getattr(self, name)}")
        if self.hidden_size % self.attention_heads != 0:
            raise ModelError(
                f"hidden_size {self.hidden_size} is not divisible by "
                f"attention_heads {self.attention_heads}")
        if self.confidence_threshold < 0:
            raise ModelError("confidence_threshold must be >= 0, "
                             f"got {self.confidence_threshold}")

    @property
    def ffn_size(self) -> int:
        return 4 * self.hidden_size

    @classmethod
    def desk(cls, **overrides) -> "TrainerConfig":
        """CPU-sized defaults: 2 layers, hidden 128, a few thousand steps."""
        return replace(cls(layers=2, hidden_size=128, steps=3000),
                       **overrides)

    def to_dict(self) -> dict:
        return {"layers": self.layers,
                "attention_heads": self.attention_heads,
                "hidden_size": self.hidden_size,
                "beam_size": self.beam_size,
                "steps": self.steps,
                "confidence_threshold": self.confidence_threshold,
                "seed": self.seed}

    @classmethod
    def from_dict(cls, doc: dict) -> "TrainerConfig":
        return cls(**doc)


def _sinusoidal_positions(max_len: int, dim: int) -> torch.Tensor:
    position = torch.arange(max_len, dtype=torch.float).unsqueeze(1)
    freq = torch.exp(torch.arange(0, dim, 2, dtype=torch.float)
                     * (-math.log(10_000.0) / dim))
    table = torch.zeros(max_len, dim)
    table[:, 0::2] = torch.sin(position * freq)
    table[:, 1::2] = torch.cos(position * freq)
    return table


class DenoiserModel(nn.Module):
    """Encoder–decoder over token ids; output projection ties the
    embedding matrix, so logits and embeddings share one table."""

    MAX_POSITIONS = 512

    def __init__(self, vocab_size: int, config: TrainerConfig,
                 dropout: float = 0.1):
        super().__init__()
        if vocab_size < 5:
            raise ModelError(f"vocab_size {vocab_size} is too small")
        self.vocab_size = vocab_size
        self.config = config
        d = config.hidden_size
        self.embed = nn.Embedding(vocab_size, d, padding_idx=PAD_ID)
        # N(0, 1/sqrt(d)) so the sqrt(d) input scaling yields unit-variance
        # activations; the pad row stays zero.
        nn.init.normal_(self.embed.weight, mean=0.0, std=d ** -0.5)
        with torch.no_grad():
            self.embed.weight[PAD_ID].zero_()
        self.register_buffer(
            "positions", _sinusoidal_positions(self.MAX_POSITIONS, d),
            persistent=False)
        self.dropout = nn.Dropout(dropout)
        enc_layer = nn.TransformerEncoderLayer(
            d_model=d, nhead=config.attention_heads,
            dim_feedforward=config.ffn_size, dropout=dropout,
            batch_first=True)
        dec_layer = nn.TransformerDecoderLayer(
            d_model=d, nhead=config.attention_heads,
            dim_feedforward=config.ffn_size, dropout=dropout,
            batch_first=True)
        self.encoder = nn.TransformerEncoder(
            enc_layer, config.layers, enable_nested_tensor=False)
        self.decoder = nn.TransformerDecoder(dec_layer, config.layers)
        self.scale = math.sqrt(d)

    def _embed(self, ids: torch.Tensor) -> torch.Tensor:
        if ids.shape[1] > self.MAX_POSITIONS:
            raise ModelError(
                f"sequence length {ids.shape[1]} exceeds the "
                f"{self.MAX_POSITIONS}-position table")
        x = self.embed(ids) * self.scale + self.positions[:ids.shape[1]]
        return self.dropout(x)

    def encode(self, src: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """Run the encoder; returns (memory, src_padding_mask)."""
        src_pad = src.eq(PAD_ID)
        memory = self.encoder(self._embed(src), src_key_padding_mask=src_pad)
        return memory, src_pad

    def decode(self, tgt_in: torch.Tensor, memory: torch.Tensor,
               src_pad: torch.Tensor) -> torch.Tensor:
        """Teacher-forced decoder pass; returns logits [B, T, vocab]."""
        t = tgt_in.shape[1]
        causal = torch.triu(
            torch.ones(t, t, dtype=torch.bool, device=tgt_in.device), 1)
        out = self.decoder(
            self._embed(tgt_in), memory, tgt_mask=causal,
            tgt_key_padding_mask=tgt_in.eq(PAD_ID),
            memory_key_padding_mask=src_pad)
        return out @ self.embed.weight.T

    def forward(self, src: torch.Tensor, tgt_in: torch.Tensor,
                ) -> torch.Tensor:
        memory, src_pad = self.encode(src)
        return self.decode(tgt_in, memory, src_pad)


def build_model(vocab_size: int, config: TrainerConfig) -> DenoiserModel:
    """Construct a freshly initialized model, seeded for reproducibility."""
    torch.manual_seed(config.seed)
    return DenoiserModel(vocab_size, config)


def count_parameters(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters() if p.requires_grad)
