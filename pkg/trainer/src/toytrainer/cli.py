"""Command-line interface: `toy-trainer train` and `toy-trainer predict`.

Both subcommands work entirely on files emitted by the typosmith
pipeline: token-id datasets from `bpe-encode`/`split`, the merges file
and token table from `bpe-fit`.  `predict` writes the same
``output<TAB>confidence<TAB>corrected`` TSV the statistical corrector
emits, so `typosmith eval --predictions` can score it directly.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from . import __version__
from .data import Dataset
from .inference import predict_lines, format_prediction
from .model import TrainerConfig
from .training import load_checkpoint, train_model
from .vocab import SubwordVocab


def _build_config(args) -> TrainerConfig:
    base = TrainerConfig() if args.full_size else TrainerConfig.desk()
    overrides = {name: getattr(args, name)
                 for name in ("layers", "hidden_size", "steps", "seed")
                 if getattr(args, name) is not None}
    if overrides:
        base = dataclasses.replace(base, **overrides)
    return base


def _cmd_train(args) -> int:
    vocab = SubwordVocab.load(args.merges, args.tokens)
    config = _build_config(args)
    dataset = Dataset.load(args.train, args.valid, vocab.size)
    result = train_model(
        dataset, vocab.size, config, args.out_dir,
        batch_size=args.batch_size, warmup_steps=args.warmup_steps,
        checkpoint_every=args.checkpoint_every)
    state = "converged" if result.converged else "NOT converged"
    print(f"trained {result.steps} steps "
          f"({len(dataset.train)} train / {len(dataset.valid)} valid): "
          f"validation loss {result.initial_validation_loss:.4f} -> "
          f"{result.final_validation_loss:.4f} ({state})")
    print(f"checkpoint: {result.checkpoint_path}")
    return 0


def _cmd_predict(args) -> int:
    vocab = SubwordVocab.load(args.merges, args.tokens)
    checkpoint = Path(args.checkpoint)
    if checkpoint.is_dir():
        checkpoint = checkpoint / "model.pt"
    model = load_checkpoint(checkpoint)
    with open(args.input, encoding="utf-8") as fh:
        queries = [line.rstrip("\n") for line in fh
                   if line.strip() and not line.startswith("#")]
    corrections = predict_lines(model, vocab, queries, args.threshold)
    with open(args.out, "w", encoding="utf-8") as fh:
        for correction in corrections:
            fh.write(format_prediction(correction) + "\n")
    corrected = sum(c.corrected for c in corrections)
    print(f"predicted {len(corrections)} queries "
          f"({corrected} corrected) -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toy-trainer",
        description="desk-scale denoising transformer over typosmith data")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("train", help="train a denoiser")
    sub.add_argument("--train", required=True, help="train ids TSV")
    sub.add_argument("--valid", required=True, help="validation ids TSV")
    sub.add_argument("--merges", required=True, help="BPE merges file")
    sub.add_argument("--tokens", required=True, help="token-id table")
    sub.add_argument("--out-dir", required=True,
                     help="checkpoint + metrics directory")
    sub.add_argument("--full-size", action="store_true",
                     help="full-size config (4 layers, hidden 256) instead "
                          "of the desk default (2 layers, hidden 128)")
    sub.add_argument("--layers", type=int)
    sub.add_argument("--hidden-size", type=int)
    sub.add_argument("--steps", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--batch-size", type=int, default=128)
    sub.add_argument("--warmup-steps", type=int, default=400)
    sub.add_argument("--checkpoint-every", type=int, default=0,
                     help="also snapshot every N steps (0 = final only)")
    sub.set_defaults(func=_cmd_train)

    sub = commands.add_parser("predict", help="batch-correct queries")
    sub.add_argument("--checkpoint", required=True,
                     help="checkpoint dir or model.pt file")
    sub.add_argument("--merges", required=True)
    sub.add_argument("--tokens", required=True)
    sub.add_argument("--input", required=True, help="one query per line")
    sub.add_argument("--out", required=True,
                     help="output\\tconfidence\\tcorrected TSV")
    sub.add_argument("--threshold", type=float, default=None,
                     help="confidence cut-off (default: training config)")
    sub.set_defaults(func=_cmd_predict)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
