"""Command-line pipeline: mine, distill, generate, tokenize, train,
correct, evaluate, serve.

Every artifact embeds provenance — tool version, subcommand, seed, and
SHA-256 digests of its inputs — as ``#`` comment lines (text formats)
or a ``_meta`` object (JSON).  No timestamps: re-running a subcommand
with identical inputs and flags reproduces byte-identical artifacts.
Outputs are written to a temporary file and renamed into place, so a
failing run leaves no partial artifact behind.  Randomized subcommands
default to seed 1; there is no environment entropy anywhere.
"""

from __future__ import annotations

import argparse
import contextlib
import hashlib
import json
import os
import sys
from pathlib import Path

from . import __version__
from . import bpe as bpe_mod
from . import corrector as corrector_mod
from . import evaluation as eval_mod
from . import generator as generator_mod
from . import keyboard as keyboard_mod
from . import mining as mining_mod
from . import stats as stats_mod
from .resources import layout_path

TOOL = "typosmith"
DEFAULT_SEED = 1
DEFAULT_THRESHOLD = 0.5
MAX_INPUT_LENGTH = 20
BUNDLED_LAYOUTS = ("qwerty-us", "russian", "greek", "arabic", "setswana")


class CliError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Provenance and atomic output

def _sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 16), b""):
                digest.update(chunk)
    except OSError as exc:
        raise CliError(f"cannot read input {path}: {exc}") from exc
    return digest.hexdigest()


def _meta(subcommand: str, inputs: dict[str, str | Path],
          seed: int | None = None) -> dict:
    meta = {
        "tool": TOOL,
        "version": __version__,
        "subcommand": subcommand,
        "inputs": {name: f"sha256:{_sha256(p)}" for name, p in inputs.items()},
    }
    if seed is not None:
        meta["seed"] = seed
    return meta


def _header_lines(meta: dict) -> list[str]:
    lines = [f"# {meta['tool']} {meta['version']} {meta['subcommand']}"]
    if "seed" in meta:
        lines.append(f"# seed: {meta['seed']}")
    for name, digest in meta["inputs"].items():
        lines.append(f"# input {name}: {digest}")
    return lines


@contextlib.contextmanager
def _atomic_outputs(*paths: str | Path):
    """Yield temp paths; rename all into place only if the body succeeds."""
    tmps = [Path(f"{p}.tmp") for p in paths]
    try:
        yield tmps if len(tmps) > 1 else tmps[0]
    except BaseException:
        for tmp in tmps:
            tmp.unlink(missing_ok=True)
        raise
    for tmp, path in zip(tmps, paths):
        os.replace(tmp, path)


def _write_text_artifact(path: Path, meta: dict, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in _header_lines(meta):
            fh.write(line + "\n")
        for line in lines:
            fh.write(line + "\n")


def _read_lines(path: str | Path, keep_empty: bool = False) -> list[str]:
    """Input lines minus '#' provenance comments (and blanks by default)."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = [line.rstrip("\n") for line in fh]
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in raw if not ln.startswith("#")]
    if not keep_empty:
        lines = [ln for ln in lines if ln]
    return lines


def _resolve_layout(name_or_path: str) -> keyboard_mod.KeyboardLayout:
    p = Path(name_or_path)
    if p.exists():
        return keyboard_mod.load_layout(p)
    if name_or_path in BUNDLED_LAYOUTS:
        return keyboard_mod.load_layout(layout_path(name_or_path))
    raise CliError(
        f"unknown layout {name_or_path!r}: expected a file or one of "
        + ", ".join(BUNDLED_LAYOUTS))


def _format_bool(flag: bool) -> str:
    return "true" if flag else "false"


# ---------------------------------------------------------------------------
# Subcommands

def _cmd_mine(args) -> int:
    config = mining_mod.MiningConfig(
        window_size=args.window_size,
        max_edit_distance=args.max_edit_distance,
        popularity_ratio=args.popularity_ratio,
        top_token_count=args.top_token_count,
        forbidden_chars=frozenset(args.forbidden_chars))
    config.validate()
    records, malformed = mining_mod.read_query_log(args.log)
    vocabulary = mining_mod.read_vocabulary(args.vocab)
    pairs, report = mining_mod.mine_pairs(records, vocabulary, config)
    report.malformed_records = malformed
    meta = _meta("mine", {"log": args.log, "vocab": args.vocab})
    with _atomic_outputs(args.out, args.report) as (tmp_pairs, tmp_report):
        _write_text_artifact(
            tmp_pairs, meta,
            [f"{p.typo}\t{p.correct}" for p in sorted(pairs)])
        payload = report.to_dict()
        payload["_meta"] = meta
        tmp_report.write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
    print(f"mined {len(pairs)} pairs "
          f"({report.judged} judged, {malformed} malformed records)")
    return 0


def _cmd_stats(args) -> int:
    pairs = mining_mod.read_pairs(args.pairs)
    if not pairs:
        raise CliError(f"no pairs in {args.pairs}")
    try:
        stats = stats_mod.extract_stats(mining_mod.iter_pair_records(pairs))
    except ValueError as exc:
        raise CliError(
            f"{exc} (stats distillation needs single-edit pairs; "
            "generate them with `gen --single-edit-only`)") from exc
    meta = _meta("stats", {"pairs": args.pairs})
    with _atomic_outputs(args.out) as tmp:
        stats_mod.save_stats(stats, tmp, extra_meta=meta)
    print(f"distilled stats from {stats.sample_count} pairs -> {args.out}")
    return 0


def _cmd_gen(args) -> int:
    inputs = {"corpus": args.corpus}
    stats = None
    if args.uniform:
        mode = generator_mod.UNIFORM
    else:
        mode = generator_mod.REALISTIC
        if not args.stats:
            raise CliError("realistic generation requires --stats "
                           "(or pass --uniform)")
        inputs["stats"] = args.stats
        stats = stats_mod.load_stats(args.stats)
    config = generator_mod.GenerationConfig(
        mode=mode,
        mean_typos_per_record=args.mean,
        max_typos_per_record=args.max_edits,
        seed=args.seed,
        uniform_alphabet=args.alphabet,
        min_length=args.min_length)
    config.validate()
    lines = _read_lines(args.corpus)
    meta = _meta("gen", inputs, seed=args.seed)
    out_lines = []
    for typo, original, log in generator_mod.corrupt_corpus(
            lines, stats, config):
        # one applied edit that changed the string == OSA distance exactly 1
        if args.single_edit_only and (len(log) != 1 or typo == original):
            continue
        out_lines.append(f"{typo}\t{original}")
    with _atomic_outputs(args.out) as tmp:
        _write_text_artifact(tmp, meta, out_lines)
    print(f"generated {len(out_lines)} pairs ({mode}) -> {args.out}")
    return 0


def _cmd_transfer(args) -> int:
    stats = stats_mod.load_stats(args.stats)
    source = _resolve_layout(args.source)
    target = _resolve_layout(args.target)
    transferred, report = keyboard_mod.transfer_stats(
        stats, source, target, return_report=True)
    meta = _meta("transfer", {"stats": args.stats})
    meta["source_layout"] = source.name
    meta["target_layout"] = target.name
    with _atomic_outputs(args.out) as tmp:
        stats_mod.save_stats(transferred, tmp, extra_meta=meta)
    if args.report:
        with _atomic_outputs(args.report) as tmp:
            payload = dict(report)
            payload["_meta"] = meta
            tmp.write_text(
                json.dumps(payload, indent=2, sort_keys=True) + "\n",
                encoding="utf-8")
    print(f"transferred {source.name} -> {target.name}, dropped "
          f"{100 * report['dropped_mass_fraction']:.2f}% of confusion mass")
    return 0


def _cmd_bpe_fit(args) -> int:
    if not args.pairs and not args.corpus:
        raise CliError("bpe-fit needs --pairs and/or --corpus")
    corpus: list[str] = []
    inputs: dict[str, str] = {}
    if args.pairs:
        inputs["pairs"] = args.pairs
        for pair in mining_mod.read_pairs(args.pairs):
            corpus.append(pair.typo)
            corpus.append(pair.correct)
    if args.corpus:
        inputs["corpus"] = args.corpus
        corpus.extend(_read_lines(args.corpus))
    vocab = bpe_mod.fit(corpus, args.target_size)
    table = bpe_mod.build_token_table(vocab)
    meta = _meta("bpe-fit", inputs)
    with _atomic_outputs(args.out, args.tokens) as (tmp_vocab, tmp_tokens):
        with open(tmp_vocab, "w", encoding="utf-8") as fh:
            for line in _header_lines(meta):
                fh.write(line + "\n")
            fh.write(f"{bpe_mod.VOCAB_HEADER_PREFIX}{vocab.vocab_size}\n")
            for left, right in vocab.merges:
                fh.write(f"{left} {right}\n")
        with open(tmp_tokens, "w", encoding="utf-8") as fh:
            for line in _header_lines(meta):
                fh.write(line + "\n")
            fh.write(f"{bpe_mod.TOKEN_HEADER_PREFIX}{len(table)}\n")
            for token in table:
                fh.write(token + "\n")
    print(f"fit {len(vocab.merges)} merges over {len(corpus)} lines "
          f"-> {args.out}")
    return 0


def _cmd_bpe_encode(args) -> int:
    vocab = bpe_mod.load_vocab(args.vocab)
    table = bpe_mod.load_token_table(args.tokens)
    index = {t: i for i, t in enumerate(table)}
    pairs = mining_mod.read_pairs(args.pairs)
    meta = _meta("bpe-encode", {"vocab": args.vocab, "tokens": args.tokens,
                                "pairs": args.pairs})
    id_lines, raw_lines = [], []
    for pair in pairs:
        src = bpe_mod.tokens_to_ids(bpe_mod.encode(pair.typo, vocab), index)
        tgt = bpe_mod.tokens_to_ids(bpe_mod.encode(pair.correct, vocab), index)
        id_lines.append(" ".join(map(str, src)) + "\t"
                        + " ".join(map(str, tgt)))
        raw_lines.append(f"{pair.typo}\t{pair.correct}")
    outs = [args.out_ids] + ([args.out_raw] if args.out_raw else [])
    with _atomic_outputs(*outs) as tmps:
        tmps = tmps if isinstance(tmps, list) else [tmps]
        _write_text_artifact(tmps[0], meta, id_lines)
        if args.out_raw:
            _write_text_artifact(tmps[1], meta, raw_lines)
    print(f"encoded {len(id_lines)} pairs -> {args.out_ids}")
    return 0


def _cmd_split(args) -> int:
    lines = _read_lines(args.input)
    train, valid, test = bpe_mod.split_dataset(lines, args.seed)
    meta = _meta("split", {"input": args.input}, seed=args.seed)
    with _atomic_outputs(args.out_train, args.out_valid, args.out_test) \
            as (tmp_train, tmp_valid, tmp_test):
        _write_text_artifact(tmp_train, meta, train)
        _write_text_artifact(tmp_valid, meta, valid)
        _write_text_artifact(tmp_test, meta, test)
    print(f"split {len(lines)} lines -> "
          f"{len(train)}/{len(valid)}/{len(test)}")
    return 0


def _cmd_train_baseline(args) -> int:
    if bool(args.pairs) == bool(args.corpus):
        raise CliError("train-baseline needs exactly one of --pairs/--corpus")
    if args.pairs:
        corpus = [p.correct for p in mining_mod.read_pairs(args.pairs)]
        inputs = {"pairs": args.pairs}
    else:
        corpus = _read_lines(args.corpus)
        inputs = {"corpus": args.corpus}
    lm = corrector_mod.train(corpus, smoothing_mass=args.smoothing)
    meta = _meta("train-baseline", inputs)
    with _atomic_outputs(args.out) as tmp:
        corrector_mod.save_model(lm, tmp, extra_meta=meta)
    print(f"trained on {lm.total_lines} lines "
          f"({len(lm.line_counts)} distinct) -> {args.out}")
    return 0


def _correction_for(query: str, lm, stats, threshold: float,
                    max_input_length: int) -> corrector_mod.Correction:
    if len(query) >= max_input_length:
        return corrector_mod.Correction(query, 1.0, False)
    return corrector_mod.correct(query, lm, stats, threshold)


def _cmd_correct(args) -> int:
    lm = corrector_mod.load_model(args.model)
    stats = stats_mod.load_stats(args.stats)
    queries = _read_lines(args.input, keep_empty=True)
    meta = _meta("correct", {"model": args.model, "stats": args.stats,
                             "input": args.input})
    out_lines = []
    for query in queries:
        c = _correction_for(query, lm, stats, args.threshold,
                            args.max_input_length)
        out_lines.append(
            f"{c.output}\t{c.confidence:.6f}\t{_format_bool(c.corrected)}")
    with _atomic_outputs(args.out) as tmp:
        _write_text_artifact(tmp, meta, out_lines)
    corrected = sum(1 for line in out_lines if line.endswith("\ttrue"))
    print(f"corrected {corrected}/{len(queries)} queries -> {args.out}")
    return 0


def _load_predictions(path: str | Path) -> list[str]:
    """First TSV column of a predictions file (plain outputs also work)."""
    return [line.split("\t")[0] for line in
            _read_lines(path, keep_empty=True)]


def _cmd_eval(args) -> int:
    pairs = mining_mod.read_pairs(args.pairs)
    if not pairs:
        raise CliError(f"no pairs in {args.pairs}")
    references = [p.correct for p in pairs]
    inputs = {"pairs": args.pairs}
    if args.predictions:
        inputs["predictions"] = args.predictions
        predictions = _load_predictions(args.predictions)
        typo_accuracy = eval_mod.sequence_accuracy(predictions, references)
        if args.identity_predictions:
            inputs["identity_predictions"] = args.identity_predictions
            identity_predictions = _load_predictions(args.identity_predictions)
            identity_accuracy = eval_mod.sequence_accuracy(
                identity_predictions, references)
            n_identity = len(references)
        else:
            identity_accuracy, n_identity = None, 0
        payload = {
            "typo_accuracy": typo_accuracy,
            "identity_accuracy": identity_accuracy,
            "n_typos": len(references),
            "n_identity": n_identity,
            "curve": [],
        }
    else:
        if not (args.model and args.stats):
            raise CliError("eval needs --model and --stats "
                           "(or --predictions)")
        inputs["model"] = args.model
        inputs["stats"] = args.stats
        lm = corrector_mod.load_model(args.model)
        stats = stats_mod.load_stats(args.stats)

        def fn(query: str) -> str:
            return _correction_for(query, lm, stats, args.threshold,
                                   args.max_input_length).output

        report = eval_mod.evaluate(fn, pairs)
        payload = report.to_dict()
        typo_accuracy = report.typo_accuracy
        identity_accuracy = report.identity_accuracy
    payload["_meta"] = _meta("eval", inputs)
    with _atomic_outputs(args.out) as tmp:
        tmp.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                       encoding="utf-8")
    identity_text = ("-" if identity_accuracy is None
                     else f"{100 * identity_accuracy:.2f}")
    print(f"typos {100 * typo_accuracy:.2f}  identity {identity_text}")
    return 0


def _parse_thresholds(raw: str) -> list[float]:
    try:
        thresholds = [float(t) for t in raw.split(",") if t.strip()]
    except ValueError as exc:
        raise CliError(f"bad --thresholds value: {raw!r}") from exc
    if not thresholds or thresholds != sorted(thresholds):
        raise CliError("--thresholds must be ascending and non-empty")
    return thresholds


def _cmd_curve(args) -> int:
    lm = corrector_mod.load_model(args.model)
    stats = stats_mod.load_stats(args.stats)
    queries = _read_lines(args.queries, keep_empty=True)
    if not queries:
        raise CliError(f"no queries in {args.queries}")
    thresholds = _parse_thresholds(args.thresholds)
    # score once per query, then sweep thresholds over the posteriors
    scored = [corrector_mod.score_input(q, lm, stats) for q in queries
              if len(q) < args.max_input_length]
    passthrough = len(queries) - len(scored)
    curve = []
    for threshold in thresholds:
        corrected = sum(s.decide(threshold).corrected for s in scored)
        curve.append((threshold, corrected / len(queries)))
    meta = _meta("curve", {"model": args.model, "stats": args.stats,
                           "queries": args.queries})
    with _atomic_outputs(args.out) as tmp:
        with open(tmp, "w", encoding="utf-8") as fh:
            for line in _header_lines(meta):
                fh.write(line + "\n")
            fh.write(eval_mod.curve_to_csv(curve))
    print(f"curve over {len(queries)} queries "
          f"({passthrough} passthrough) -> {args.out}")
    return 0


def _cmd_serve(args) -> int:
    lm = corrector_mod.load_model(args.model)
    stats = stats_mod.load_stats(args.stats)
    for raw in sys.stdin:
        query = raw.rstrip("\n")
        c = _correction_for(query, lm, stats, args.threshold,
                            args.max_input_length)
        sys.stdout.write(
            f"{c.output}\t{c.confidence:.6f}\t{_format_bool(c.corrected)}\n")
        sys.stdout.flush()
    return 0


# ---------------------------------------------------------------------------
# Argument wiring

def _add_threshold_flags(sub) -> None:
    sub.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD,
                     help=f"confidence cut-off (default {DEFAULT_THRESHOLD})")
    sub.add_argument("--max-input-length", type=int,
                     default=MAX_INPUT_LENGTH,
                     help="inputs at least this long pass through unchanged "
                          f"(default {MAX_INPUT_LENGTH})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=TOOL,
        description="Mine human typos, distill stats, generate artificial "
                    "typos, and train/evaluate a statistical corrector.")
    parser.add_argument("--version", action="version",
                        version=f"{TOOL} {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("mine", help="mine typo pairs from a query log")
    sub.add_argument("--log", required=True, help="user\\tts\\tquery TSV")
    sub.add_argument("--vocab", required=True, help="one token per line")
    sub.add_argument("--out", required=True, help="typo\\tcorrect TSV")
    sub.add_argument("--report", required=True, help="mining report JSON")
    sub.add_argument("--window-size", type=int, default=10)
    sub.add_argument("--max-edit-distance", type=int, default=1)
    sub.add_argument("--popularity-ratio", type=float, default=15)
    sub.add_argument("--top-token-count", type=int, default=1500)
    sub.add_argument("--forbidden-chars", default="@_#\\")
    sub.set_defaults(fn=_cmd_mine)

    sub = commands.add_parser("stats", help="distill TypoStats from pairs")
    sub.add_argument("--pairs", required=True)
    sub.add_argument("--out", required=True)
    sub.set_defaults(fn=_cmd_stats)

    sub = commands.add_parser("gen", help="corrupt a corpus into typo pairs")
    sub.add_argument("--corpus", required=True, help="one text per line")
    sub.add_argument("--stats", help="TypoStats JSON (realistic mode)")
    sub.add_argument("--out", required=True)
    sub.add_argument("--uniform", action="store_true",
                     help="uniform edits instead of realistic stats")
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub.add_argument("--mean", type=float, default=1.0,
                     help="mean edits per record")
    sub.add_argument("--max-edits", type=int, default=3,
                     help="max edits per record")
    sub.add_argument("--min-length", type=int, default=2)
    sub.add_argument("--alphabet", default=generator_mod.ASCII_LETTERS,
                     help="character pool for uniform mode")
    sub.add_argument("--single-edit-only", action="store_true",
                     help="keep only pairs at edit distance exactly 1 "
                          "(the input stats distillation expects)")
    sub.set_defaults(fn=_cmd_gen)

    sub = commands.add_parser(
        "transfer", help="map stats onto another keyboard layout")
    sub.add_argument("--stats", required=True)
    sub.add_argument("--source", required=True,
                     help="bundled layout name or JSON path")
    sub.add_argument("--target", required=True)
    sub.add_argument("--out", required=True)
    sub.add_argument("--report", help="optional drop-accounting JSON")
    sub.set_defaults(fn=_cmd_transfer)

    sub = commands.add_parser("bpe-fit", help="fit a BPE vocabulary")
    sub.add_argument("--pairs", help="typo\\tcorrect TSV (both sides used)")
    sub.add_argument("--corpus", help="plain lines")
    sub.add_argument("--target-size", type=int, required=True)
    sub.add_argument("--out", required=True, help="merges file")
    sub.add_argument("--tokens", required=True, help="token-id table file")
    sub.set_defaults(fn=_cmd_bpe_fit)

    sub = commands.add_parser("bpe-encode", help="encode pairs to token ids")
    sub.add_argument("--vocab", required=True, help="merges file")
    sub.add_argument("--tokens", required=True, help="token-id table file")
    sub.add_argument("--pairs", required=True)
    sub.add_argument("--out-ids", required=True,
                     help="encoded_source\\tencoded_target id TSV")
    sub.add_argument("--out-raw", help="raw-text TSV copy")
    sub.set_defaults(fn=_cmd_bpe_encode)

    sub = commands.add_parser("split", help="100:1:1 train/valid/test split")
    sub.add_argument("--input", required=True)
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub.add_argument("--out-train", required=True)
    sub.add_argument("--out-valid", required=True)
    sub.add_argument("--out-test", required=True)
    sub.set_defaults(fn=_cmd_split)

    sub = commands.add_parser(
        "train-baseline", help="train the unigram language model")
    sub.add_argument("--pairs", help="train on the correct side of pairs")
    sub.add_argument("--corpus", help="train on plain lines")
    sub.add_argument("--smoothing", type=float, default=1e-9)
    sub.add_argument("--out", required=True, help="model JSON")
    sub.set_defaults(fn=_cmd_train_baseline)

    sub = commands.add_parser("correct", help="batch-correct queries")
    sub.add_argument("--model", required=True)
    sub.add_argument("--stats", required=True)
    sub.add_argument("--input", required=True, help="one query per line")
    sub.add_argument("--out", required=True,
                     help="output\\tconfidence\\tcorrected TSV")
    _add_threshold_flags(sub)
    sub.set_defaults(fn=_cmd_correct)

    sub = commands.add_parser("eval", help="Typos/Identity accuracy")
    sub.add_argument("--pairs", required=True)
    sub.add_argument("--model")
    sub.add_argument("--stats")
    sub.add_argument("--predictions",
                     help="pre-computed predictions for the typo side, "
                          "aligned with the pairs file")
    sub.add_argument("--identity-predictions",
                     help="pre-computed predictions for the correct side")
    sub.add_argument("--out", required=True, help="report JSON")
    _add_threshold_flags(sub)
    sub.set_defaults(fn=_cmd_eval)

    sub = commands.add_parser(
        "curve", help="correction rate vs confidence threshold")
    sub.add_argument("--model", required=True)
    sub.add_argument("--stats", required=True)
    sub.add_argument("--queries", required=True, help="one query per line")
    sub.add_argument("--thresholds",
                     default="0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")
    sub.add_argument("--out", required=True, help="CSV")
    sub.add_argument("--max-input-length", type=int, default=MAX_INPUT_LENGTH)
    sub.set_defaults(fn=_cmd_curve)

    sub = commands.add_parser(
        "serve", help="line-per-query loop on standard input")
    sub.add_argument("--model", required=True)
    sub.add_argument("--stats", required=True)
    _add_threshold_flags(sub)
    sub.set_defaults(fn=_cmd_serve)

    return parser


# every module error type subclasses ValueError
ERRORS = (ValueError, OSError)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
