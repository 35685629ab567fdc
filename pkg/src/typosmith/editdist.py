"""Optimal string alignment (restricted Damerau-Levenshtein) distance and
single-edit classification.

Distances and positions are measured in Unicode scalar values (Python string
indices), never bytes. The restricted variant never edits a substring twice,
so e.g. distance("abc", "ca") == 3 even though the unrestricted variant
gives 2.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Tuple


class EditKind(enum.Enum):
    INSERTION = "insertion"
    SUBSTITUTION = "substitution"
    DELETION = "deletion"
    TRANSPOSITION = "transposition"

    def __str__(self) -> str:  # keeps log/report output compact
        return self.value


@dataclass(frozen=True)
class EditClassification:
    """A single edit transforming a correct string into a typo.

    ``position`` indexes into the correct string. For an insertion it is the
    index the new character occupies (may equal len(correct): insertion at
    the end). ``chars`` holds one character for insertion/deletion, the
    (old, new) pair for substitution and the swapped adjacent pair for
    transposition.
    """

    kind: EditKind
    position: int
    chars: Tuple[str, ...]

    def apply(self, correct: str) -> str:
        """Reproduce the typo this classification describes."""
        return apply_edit(self, correct)


def damerau_levenshtein(a: str, b: str) -> int:
    """Optimal string alignment distance between two strings.

    Insertions, deletions, substitutions and adjacent transpositions each
    cost 1; a transposed pair is never edited again.
    """
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    # Rolling three-row DP; row[j] = distance between a[:i] and b[:j].
    prev2 = [0] * (lb + 1)
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        cur = [i] + [0] * lb
        ai = a[i - 1]
        for j in range(1, lb + 1):
            cost = 0 if ai == b[j - 1] else 1
            best = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
            if i > 1 and j > 1 and ai == b[j - 2] and a[i - 2] == b[j - 1]:
                best = min(best, prev2[j - 2] + 1)
            cur[j] = best
        prev2, prev = prev, cur
    return prev[lb]


def first_divergence_position(correct: str, typo: str) -> int:
    """Index of the first character where the two strings differ.

    If one string is a prefix of the other, the divergence is at the end of
    the shorter string. Identical strings have no divergence and raise.
    """
    if correct == typo:
        raise ValueError("identical strings have no divergence position")
    for i, (c, t) in enumerate(zip(correct, typo)):
        if c != t:
            return i
    return min(len(correct), len(typo))


def classify_single_edit(correct: str, typo: str) -> EditClassification:
    """Classify the unique single edit turning ``correct`` into ``typo``.

    The pair must be at OSA distance exactly 1. When several positions could
    explain the edit (repeated characters), the leftmost one is returned;
    when a same-length pair could read as either a substitution or a
    transposition, substitution wins.
    """
    lc, lt = len(correct), len(typo)
    result: Optional[EditClassification] = None
    if lt == lc + 1:
        i = first_divergence_position(correct, typo)
        if correct[:i] + typo[i] + correct[i:] == typo:
            # Inside a run of equal characters every slot explains the same
            # insertion; walk back to the leftmost one.
            p = i
            while p > 0 and correct[p - 1] == typo[i]:
                p -= 1
            result = EditClassification(EditKind.INSERTION, p, (typo[i],))
    elif lt == lc - 1:
        i = first_divergence_position(correct, typo)
        if correct[:i] + correct[i + 1:] == typo:
            p = i
            while p > 0 and correct[p - 1] == correct[i]:
                p -= 1
            result = EditClassification(EditKind.DELETION, p, (correct[i],))
    elif lt == lc and typo != correct:
        i = first_divergence_position(correct, typo)
        if correct[:i] + typo[i] + correct[i + 1:] == typo:
            result = EditClassification(
                EditKind.SUBSTITUTION, i, (correct[i], typo[i]))
        elif (i + 1 < lc
              and correct[i] == typo[i + 1]
              and correct[i + 1] == typo[i]
              and correct[i + 2:] == typo[i + 2:]):
            result = EditClassification(
                EditKind.TRANSPOSITION, i, (correct[i], correct[i + 1]))
    if result is None:
        raise ValueError(
            f"pair is not a single edit: {correct!r} -> {typo!r} "
            f"(distance {damerau_levenshtein(correct, typo)})")
    return result


def apply_edit(edit: EditClassification, correct: str) -> str:
    """Apply ``edit`` to ``correct``, producing the typo it describes."""
    p = edit.position
    if edit.kind is EditKind.INSERTION:
        if not 0 <= p <= len(correct):
            raise ValueError(f"insertion position {p} out of range")
        return correct[:p] + edit.chars[0] + correct[p:]
    if not 0 <= p < len(correct):
        raise ValueError(f"edit position {p} out of range")
    if edit.kind is EditKind.DELETION:
        return correct[:p] + correct[p + 1:]
    if edit.kind is EditKind.SUBSTITUTION:
        return correct[:p] + edit.chars[1] + correct[p + 1:]
    # transposition
    if p + 1 >= len(correct):
        raise ValueError(f"transposition position {p} out of range")
    return (correct[:p] + correct[p + 1] + correct[p]
            + correct[p + 2:])
