#!/usr/bin/env python3
"""Download public typo ground-truth datasets and normalize them.

Fetches the Wikipedia common-misspellings machine list and the Birkbeck
spelling-error corpora (Aspell, Birkbeck/missp, Holbrook) and converts
each to the `typo \t correct` TSV form the evaluator reads. The data is
not vendored in this repository — the corpora carry their own
licenses/usage terms, so every user fetches their own copy.

Normalization drops entries that are not a single unambiguous pair:
multi-word targets, unknown targets ("?"), and misspelling lines listing
several alternatives.
"""

import argparse
import sys
import urllib.request
from pathlib import Path

WIKIPEDIA_URL = ("https://en.wikipedia.org/wiki/Wikipedia:Lists_of_common_"
                 "misspellings/For_machines?action=raw")
BIRKBECK_BASE = "https://www.dcs.bbk.ac.uk/~ROGER/"
DAT_FILES = {
    "aspell": "aspell.dat",
    "birkbeck": "missp.dat",
    "holbrook": "holbrook-missp.dat",
}


def fetch(url: str) -> str:
    request = urllib.request.Request(url, headers={"User-Agent": "typosmith"})
    with urllib.request.urlopen(request, timeout=60) as response:
        return response.read().decode("utf-8", errors="replace")


def parse_wikipedia(text: str):
    """Lines of the form `misspelling->correct`; multi-target lines use
    commas and are skipped as ambiguous."""
    for line in text.splitlines():
        if "->" not in line:
            continue
        typo, _, correct = line.partition("->")
        typo, correct = typo.strip(), correct.strip()
        if not typo or not correct or "," in correct:
            continue
        yield typo, correct


def parse_dat(text: str):
    """Birkbeck corpus format: `$target` lines introduce the correct word;
    following lines are its misspellings. `_` marks spaces inside tokens."""
    correct = None
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("$"):
            correct = line[1:]
            continue
        if correct in (None, "?") or "_" in correct or "_" in line:
            continue
        yield line, correct


def write_pairs(pairs, path: Path) -> int:
    rows = sorted(set(pairs))
    with open(path, "w", encoding="utf-8") as fh:
        for typo, correct in rows:
            fh.write(f"{typo}\t{correct}\n")
    return len(rows)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="data/eval",
                        help="where to write the normalized TSVs")
    args = parser.parse_args()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    jobs = [("wikipedia", WIKIPEDIA_URL, parse_wikipedia)]
    jobs += [(name, BIRKBECK_BASE + filename, parse_dat)
             for name, filename in DAT_FILES.items()]
    failures = 0
    for name, url, parse in jobs:
        target = out_dir / f"{name}.tsv"
        try:
            count = write_pairs(parse(fetch(url)), target)
        except OSError as exc:
            print(f"error: {name}: {exc}", file=sys.stderr)
            failures += 1
            continue
        print(f"{name}: {count} pairs -> {target}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
