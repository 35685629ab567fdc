"""End-to-end tests for the command-line pipeline.

Most tests drive cli.main() in-process for speed; serve and the installed
console script are exercised through subprocesses because their contract
is a stdin/stdout loop.
"""

import json
import subprocess
import sys

import pytest

import mining_fixture
from typosmith import cli
from typosmith.bpe import decode, load_token_table
from typosmith.editdist import damerau_levenshtein
from typosmith.mining import read_pairs
from typosmith.resources import default_stats_path, load_wordlist
from typosmith.stats import load_stats

STATS = str(default_stats_path())


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """A corpus, generated pairs and a trained model, built once.

    The corpus is popularity-weighted (head words repeated) so that the
    corrector's language-model prior can outweigh the identity floor.
    """
    root = tmp_path_factory.mktemp("cli")
    words = load_wordlist()[:300]
    lines = []
    for i, word in enumerate(words):
        lines.extend([word] * (30 if i < 60 else 1))
    corpus = root / "corpus.txt"
    corpus.write_text("\n".join(lines) + "\n", encoding="utf-8")
    pairs = root / "pairs.tsv"
    assert run("gen", "--corpus", corpus, "--stats", STATS,
               "--out", pairs, "--seed", 7) == 0
    model = root / "model.json"
    assert run("train-baseline", "--corpus", corpus, "--out", model) == 0
    return {"root": root, "corpus": corpus, "pairs": pairs, "model": model,
            "words": words}


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        run("--version")
    assert exc.value.code == 0
    assert capsys.readouterr().out.startswith("typosmith ")


# ---------------------------------------------------------------------------
# gen

def test_gen_same_seed_byte_identical(workdir, tmp_path):
    a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
    for out in (a, b):
        assert run("gen", "--corpus", workdir["corpus"], "--stats", STATS,
                   "--out", out, "--seed", 3) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_different_seed_differs(workdir, tmp_path):
    a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
    assert run("gen", "--corpus", workdir["corpus"], "--stats", STATS,
               "--out", a, "--seed", 3) == 0
    assert run("gen", "--corpus", workdir["corpus"], "--stats", STATS,
               "--out", b, "--seed", 4) == 0
    assert [p.typo for p in read_pairs(a)] != [p.typo for p in read_pairs(b)]


def test_gen_pairs_align_with_corpus(workdir):
    pairs = read_pairs(workdir["pairs"])
    originals = [p.correct for p in pairs]
    corpus_lines = [ln for ln in
                    workdir["corpus"].read_text().splitlines() if ln]
    assert originals == corpus_lines


def test_gen_uniform_needs_no_stats(workdir, tmp_path):
    out = tmp_path / "base.tsv"
    assert run("gen", "--corpus", workdir["corpus"], "--uniform",
               "--out", out, "--seed", 5) == 0
    assert len(read_pairs(out)) == len(read_pairs(workdir["pairs"]))


def test_gen_realistic_requires_stats(workdir, tmp_path, capsys):
    assert run("gen", "--corpus", workdir["corpus"],
               "--out", tmp_path / "x.tsv") == 1
    err = capsys.readouterr().err
    assert err.startswith("error: ") and err.count("\n") == 1


def test_gen_single_edit_only_filter(workdir, tmp_path):
    out = tmp_path / "single.tsv"
    assert run("gen", "--corpus", workdir["corpus"], "--stats", STATS,
               "--out", out, "--seed", 7, "--single-edit-only") == 0
    pairs = read_pairs(out)
    assert pairs
    assert all(damerau_levenshtein(p.typo, p.correct) == 1 for p in pairs)
    # a filtered subset of the unfiltered run at the same seed
    unfiltered = {(p.typo, p.correct) for p in read_pairs(workdir["pairs"])}
    assert {(p.typo, p.correct) for p in pairs} <= unfiltered


def test_gen_artifact_header_records_provenance(workdir):
    head = workdir["pairs"].read_text().splitlines()[:4]
    assert head[0].startswith("# typosmith ")
    assert head[0].endswith(" gen")
    assert head[1] == "# seed: 7"
    assert head[2].startswith("# input corpus: sha256:")
    assert head[3].startswith("# input stats: sha256:")


# ---------------------------------------------------------------------------
# mine + stats

def test_mine_reproduces_fixture(tmp_path):
    log = tmp_path / "log.tsv"
    vocab = tmp_path / "vocab.txt"
    mining_fixture.write_log(log)
    vocab.write_text(
        "\n".join(sorted(mining_fixture.VOCABULARY)) + "\n", encoding="utf-8")
    out, report_path = tmp_path / "mined.tsv", tmp_path / "report.json"
    cfg = mining_fixture.CONFIG
    assert run("mine", "--log", log, "--vocab", vocab, "--out", out,
               "--report", report_path,
               "--window-size", cfg.window_size,
               "--max-edit-distance", cfg.max_edit_distance,
               "--popularity-ratio", cfg.popularity_ratio,
               "--top-token-count", cfg.top_token_count) == 0
    mined = {(p.typo, p.correct) for p in read_pairs(out)}
    assert mined == {(p.typo, p.correct)
                     for p in mining_fixture.EXPECTED_PAIRS}
    report = json.loads(report_path.read_text())
    expected = dict(mining_fixture.EXPECTED_REPORT)
    meta = report.pop("_meta")
    assert report == expected
    assert meta["subcommand"] == "mine"


def test_stats_distills_single_edit_pairs(workdir, tmp_path):
    single = tmp_path / "single.tsv"
    out = tmp_path / "stats.json"
    assert run("gen", "--corpus", workdir["corpus"], "--stats", STATS,
               "--out", single, "--seed", 7, "--single-edit-only") == 0
    assert run("stats", "--pairs", single, "--out", out) == 0
    stats = load_stats(out)
    assert stats.sample_count == len(read_pairs(single))
    assert abs(sum(stats.type_freq.values()) - 1.0) < 1e-9


def test_stats_rejects_multi_edit_pairs(workdir, tmp_path, capsys):
    out = tmp_path / "stats.json"
    assert run("stats", "--pairs", workdir["pairs"], "--out", out) == 1
    assert "single-edit" in capsys.readouterr().err
    assert not out.exists()  # failed runs leave no partial artifact


# ---------------------------------------------------------------------------
# transfer

def test_transfer_accepts_bundled_layout_names(tmp_path):
    out = tmp_path / "ru.json"
    report = tmp_path / "ru-report.json"
    assert run("transfer", "--stats", STATS, "--source", "qwerty-us",
               "--target", "russian", "--out", out, "--report", report) == 0
    load_stats(out)
    doc = json.loads(report.read_text())
    assert doc["dropped_mass_fraction"] < 0.5
    assert doc["_meta"]["target_layout"] == "russian"


def test_transfer_unknown_layout(tmp_path, capsys):
    assert run("transfer", "--stats", STATS, "--source", "dvorak",
               "--target", "russian", "--out", tmp_path / "x.json") == 1
    assert "dvorak" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# split + bpe

def test_split_sizes(workdir, tmp_path):
    paths = [tmp_path / n for n in ("train.tsv", "valid.tsv", "test.tsv")]
    assert run("split", "--input", workdir["pairs"], "--seed", 2,
               "--out-train", paths[0], "--out-valid", paths[1],
               "--out-test", paths[2]) == 0
    sizes = [len(read_pairs(p)) for p in paths]
    n = len(read_pairs(workdir["pairs"]))
    assert sizes[1] == sizes[2] == n // 102
    assert sum(sizes) == n


def test_bpe_fit_encode_decode_roundtrip(workdir, tmp_path):
    merges = tmp_path / "merges.txt"
    tokens = tmp_path / "tokens.txt"
    assert run("bpe-fit", "--pairs", workdir["pairs"],
               "--target-size", 150, "--out", merges,
               "--tokens", tokens) == 0
    ids_path = tmp_path / "enc.ids"
    assert run("bpe-encode", "--vocab", merges, "--tokens", tokens,
               "--pairs", workdir["pairs"], "--out-ids", ids_path) == 0
    table = load_token_table(tokens)
    pairs = read_pairs(workdir["pairs"])
    id_lines = [ln for ln in ids_path.read_text().splitlines()
                if not ln.startswith("#")]
    assert len(id_lines) == len(pairs)
    for line, pair in zip(id_lines, pairs):
        src_ids, tgt_ids = (list(map(int, col.split()))
                            for col in line.split("\t"))
        assert decode(table[i] for i in src_ids) == pair.typo
        assert decode(table[i] for i in tgt_ids) == pair.correct


# ---------------------------------------------------------------------------
# correct + eval + curve

def test_correct_output_format(workdir, tmp_path):
    queries = tmp_path / "queries.txt"
    queries.write_text("\n".join(workdir["words"][:20]) + "\n")
    out = tmp_path / "corrected.tsv"
    assert run("correct", "--model", workdir["model"], "--stats", STATS,
               "--input", queries, "--out", out) == 0
    rows = [ln.split("\t") for ln in out.read_text().splitlines()
            if not ln.startswith("#")]
    assert len(rows) == 20
    for output, confidence, corrected in rows:
        assert 0.0 <= float(confidence) <= 1.0
        assert corrected in ("true", "false")


def test_eval_full_mode_writes_report(workdir, tmp_path):
    out = tmp_path / "report.json"
    assert run("eval", "--pairs", workdir["pairs"],
               "--model", workdir["model"], "--stats", STATS,
               "--out", out) == 0
    doc = json.loads(out.read_text())
    assert 0.0 <= doc["typo_accuracy"] <= 1.0
    assert doc["identity_accuracy"] >= 0.95
    assert doc["n_typos"] == len(set(read_pairs(workdir["pairs"])))


def test_eval_threshold_above_one_never_corrects(workdir, tmp_path):
    """The identity corrector scores 0 on a typo-only pair set."""
    typos_only = tmp_path / "typos.tsv"
    kept = [p for p in read_pairs(workdir["pairs"]) if p.typo != p.correct]
    typos_only.write_text(
        "".join(f"{p.typo}\t{p.correct}\n" for p in kept))
    out = tmp_path / "report.json"
    assert run("eval", "--pairs", typos_only, "--model", workdir["model"],
               "--stats", STATS, "--threshold", 1.01, "--out", out) == 0
    doc = json.loads(out.read_text())
    assert doc["typo_accuracy"] == 0.0
    assert doc["identity_accuracy"] == 1.0


def test_eval_predictions_mode(workdir, tmp_path):
    # predictions mode joins by pairs-file line order, duplicates included
    pairs = read_pairs(workdir["pairs"])
    predictions = tmp_path / "pred.tsv"
    predictions.write_text("".join(f"{p.correct}\n" for p in pairs))
    out = tmp_path / "report.json"
    assert run("eval", "--pairs", workdir["pairs"],
               "--predictions", predictions, "--out", out) == 0
    doc = json.loads(out.read_text())
    assert doc["typo_accuracy"] == 1.0
    assert doc["identity_accuracy"] is None


def test_curve_rates_non_increasing(workdir, tmp_path):
    queries = tmp_path / "queries.txt"
    pairs = read_pairs(workdir["pairs"])
    queries.write_text("\n".join(p.typo for p in pairs[:150]) + "\n")
    out = tmp_path / "curve.csv"
    assert run("curve", "--model", workdir["model"], "--stats", STATS,
               "--queries", queries, "--out", out) == 0
    rows = [ln for ln in out.read_text().splitlines()
            if ln and not ln.startswith("#")]
    assert rows[0] == "threshold,correction_rate"
    rates = [float(r.split(",")[1]) for r in rows[1:]]
    assert rates == sorted(rates, reverse=True)
    assert rates[0] > 0.0  # typo-heavy queries do get corrected


# ---------------------------------------------------------------------------
# serve + process-level contract

def _serve(stdin_text, *extra_args):
    result = subprocess.run(
        [sys.executable, "-m", "typosmith", "serve",
         "--model", _serve.model, "--stats", STATS, *map(str, extra_args)],
        input=stdin_text, capture_output=True, text=True, timeout=120)
    assert result.returncode == 0, result.stderr
    return result.stdout


def test_serve_long_inputs_pass_through(workdir):
    _serve.model = workdir["model"]
    long_query = "x" * 25
    out = _serve(f"{long_query}\nshort\n")
    lines = out.splitlines()
    assert lines[0] == f"{long_query}\t1.000000\tfalse"
    assert len(lines) == 2 and len(lines[1].split("\t")) == 3


def test_serve_length_cap_is_flag_overridable(workdir):
    _serve.model = workdir["model"]
    out = _serve("abcdef\n", "--max-input-length", 5)
    assert out == "abcdef\t1.000000\tfalse\n"


def test_console_script_reports_errors_on_stderr(tmp_path):
    result = subprocess.run(
        ["typosmith", "mine", "--log", str(tmp_path / "none.tsv"),
         "--vocab", str(tmp_path / "none.txt"),
         "--out", str(tmp_path / "o.tsv"),
         "--report", str(tmp_path / "r.json")],
        capture_output=True, text=True, timeout=60)
    assert result.returncode == 1
    assert result.stderr.startswith("error: ")
    assert "Traceback" not in result.stderr
