"""Sequence-level evaluation: Typos/Identity accuracy and the
correction-rate-vs-threshold curve.

Exact match is computed on NFC-normalized strings so decomposed input
does not create spurious mismatches.  Identity accuracy is measured by
feeding each pair's correct side back through the corrector: any output
other than the input is a false positive, so identity accuracy is
1 - FPR by construction.  Both metrics run over the full pair set.
"""

from __future__ import annotations

import json
import unicodedata
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .corrector import Correction
from .mining import TypoPair


class EvalError(ValueError):
    """Raised for malformed evaluation inputs."""


def _nfc(s: str) -> str:
    return unicodedata.normalize("NFC", s)


@dataclass
class EvalReport:
    typo_accuracy: float
    identity_accuracy: float
    n_typos: int
    n_identity: int
    curve: list[tuple[float, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "typo_accuracy": self.typo_accuracy,
            "identity_accuracy": self.identity_accuracy,
            "n_typos": self.n_typos,
            "n_identity": self.n_identity,
            "curve": [[t, r] for t, r in self.curve],
        }


def sequence_accuracy(predictions: Sequence[str],
                      references: Sequence[str]) -> float:
    """Exact-match fraction over NFC-normalized strings."""
    if len(predictions) != len(references):
        raise EvalError(
            f"length mismatch: {len(predictions)} predictions vs "
            f"{len(references)} references")
    if not references:
        raise EvalError("nothing to evaluate")
    hits = sum(_nfc(p) == _nfc(r) for p, r in zip(predictions, references))
    return hits / len(references)


def evaluate(correct_fn: Callable[[str], str],
             pairs: Iterable[TypoPair]) -> EvalReport:
    """Typos accuracy on (typo -> correct), Identity accuracy on
    (correct -> correct), over the same pair set."""
    pairs = sorted(set(pairs))
    if not pairs:
        raise EvalError("nothing to evaluate")
    typo_predictions = [correct_fn(p.typo) for p in pairs]
    identity_predictions = [correct_fn(p.correct) for p in pairs]
    references = [p.correct for p in pairs]
    return EvalReport(
        typo_accuracy=sequence_accuracy(typo_predictions, references),
        identity_accuracy=sequence_accuracy(identity_predictions, references),
        n_typos=len(pairs),
        n_identity=len(pairs))


def correction_rate_curve(
        correct_fn_at: Callable[[float], Callable[[str], Correction]],
        queries: Sequence[str],
        thresholds: Sequence[float]) -> list[tuple[float, float]]:
    """Fraction of queries corrected, per ascending threshold."""
    thresholds = list(thresholds)
    if thresholds != sorted(thresholds):
        raise EvalError("thresholds must be sorted ascending")
    queries = list(queries)
    if not queries:
        raise EvalError("nothing to evaluate")
    curve = []
    for threshold in thresholds:
        fn = correct_fn_at(threshold)
        corrected = sum(fn(q).corrected for q in queries)
        curve.append((threshold, corrected / len(queries)))
    return curve


# ---------------------------------------------------------------------------
# Emission

def format_report_table(reports: dict[str, EvalReport]) -> str:
    """Aligned two-column accuracy table, percentages to 2 decimals."""
    label_width = max(len(label) for label in reports) if reports else 0
    label_width = max(label_width, len("corrector"))
    lines = [f"{'corrector':<{label_width}}  {'Typos':>8}  {'Identity':>8}"]
    for label, report in reports.items():
        lines.append(
            f"{label:<{label_width}}  "
            f"{100 * report.typo_accuracy:>8.2f}  "
            f"{100 * report.identity_accuracy:>8.2f}")
    return "\n".join(lines) + "\n"


def curve_to_csv(curve: Iterable[tuple[float, float]]) -> str:
    lines = ["threshold,correction_rate"]
    lines += [f"{t:.6g},{r:.6g}" for t, r in curve]
    return "\n".join(lines) + "\n"


def save_report(report: EvalReport, path: str | Path,
                extra_meta: dict | None = None) -> None:
    payload = report.to_dict()
    if extra_meta:
        payload["_meta"] = extra_meta
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")
