"""Mine typo/correction pairs from per-user search-query logs.

Candidate pairs are drawn from a rolling window over each user's query
stream and filtered through a fixed cascade of rules: cheap structural
checks (identity, forbidden characters, prefix, containment) run before
the edit-distance gate, which runs before the popularity and vocabulary
tests.  Structural rules deliberately outrank the distance gate so that
e.g. ("jimmy", "jim") is reported as a containment reject, which is far
more useful in a mining audit than a generic distance reject.
"""

from __future__ import annotations

from collections import Counter, deque
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from pathlib import Path

from .editdist import damerau_levenshtein

DEFAULT_FORBIDDEN_CHARS = frozenset("@_#\\")

# Rule identifiers, in the order the cascade applies them.
RULE_IDENTITY = "identity"
RULE_FORBIDDEN = "forbidden_chars"
RULE_PREFIX = "prefix"
RULE_CONTAINMENT = "containment"
RULE_EDIT_DISTANCE = "edit_distance"
RULE_POPULARITY = "popularity"
RULE_VOCABULARY = "correct_vocabulary"
RULE_KNOWN_TOKENS = "typo_known_tokens"

ALL_RULES = (
    RULE_IDENTITY,
    RULE_FORBIDDEN,
    RULE_PREFIX,
    RULE_CONTAINMENT,
    RULE_EDIT_DISTANCE,
    RULE_POPULARITY,
    RULE_VOCABULARY,
    RULE_KNOWN_TOKENS,
)


class MiningError(ValueError):
    """Raised for invalid mining configuration or unreadable logs."""


@dataclass(frozen=True)
class QueryLogRecord:
    user_id: str
    timestamp: int  # milliseconds since epoch; used only for ordering
    query: str


@dataclass(frozen=True, order=True)
class TypoPair:
    typo: str
    correct: str


@dataclass(frozen=True)
class MiningConfig:
    window_size: int = 10
    max_edit_distance: int = 1
    popularity_ratio: float = 15.0
    top_token_count: int = 1500
    forbidden_chars: frozenset[str] = DEFAULT_FORBIDDEN_CHARS

    def validate(self) -> None:
        if self.window_size < 2:
            raise MiningError(f"window_size must be >= 2, got {self.window_size}")
        if self.max_edit_distance < 1:
            raise MiningError(
                f"max_edit_distance must be >= 1, got {self.max_edit_distance}")
        if self.popularity_ratio <= 1:
            raise MiningError(
                f"popularity_ratio must be > 1, got {self.popularity_ratio}")
        if self.top_token_count < 0:
            raise MiningError(
                f"top_token_count must be >= 0, got {self.top_token_count}")


class PopularityIndex:
    """Exact query and token counts over a full log, plus the top-K tokens."""

    def __init__(self, query_counts: Counter[str], token_counts: Counter[str],
                 k: int):
        self.query_counts = query_counts
        self.token_counts = token_counts
        # Deterministic top-K: frequency first, lexicographic to break ties.
        ranked = sorted(token_counts.items(), key=lambda kv: (-kv[1], kv[0]))
        self.top_tokens: tuple[str, ...] = tuple(t for t, _ in ranked[:k])
        self._top_set = frozenset(self.top_tokens)

    def query_count(self, query: str) -> int:
        return self.query_counts.get(query, 0)

    def is_top_token(self, token: str) -> bool:
        return token in self._top_set


def build_popularity_index(records: Iterable[QueryLogRecord],
                           k: int) -> PopularityIndex:
    query_counts: Counter[str] = Counter()
    token_counts: Counter[str] = Counter()
    for record in records:
        query_counts[record.query] += 1
        token_counts.update(record.query.split())
    return PopularityIndex(query_counts, token_counts, k)


def is_correct_query(query: str, vocabulary: frozenset[str] | set[str],
                     index: PopularityIndex) -> bool:
    """True iff every whitespace token is in the vocabulary or top-K tokens."""
    tokens = query.split()
    if not tokens:
        return False
    return all(t in vocabulary or index.is_top_token(t) for t in tokens)


@dataclass(frozen=True)
class Judgement:
    accepted: bool
    rule_id: str | None = None  # set on rejects only


ACCEPT = Judgement(True)


def judge_candidate(candidate_typo: str, candidate_correct: str,
                    vocabulary: frozenset[str] | set[str],
                    index: PopularityIndex,
                    config: MiningConfig) -> Judgement:
    """Run both strings through the full rule cascade.

    Returns ``ACCEPT`` or a :class:`Judgement` carrying the id of the
    first rule that failed.
    """
    typo, correct = candidate_typo, candidate_correct
    if typo == correct:
        return Judgement(False, RULE_IDENTITY)
    if any(c in config.forbidden_chars for c in typo + correct):
        return Judgement(False, RULE_FORBIDDEN)
    if correct.startswith(typo):
        return Judgement(False, RULE_PREFIX)
    if correct in typo:
        return Judgement(False, RULE_CONTAINMENT)
    if damerau_levenshtein(typo, correct) > config.max_edit_distance:
        return Judgement(False, RULE_EDIT_DISTANCE)
    # count(typo) is at least 1 whenever the pair came out of a window, but
    # clamp anyway so ad-hoc queries can be judged against a foreign index
    typo_count = max(index.query_count(typo), 1)
    if index.query_count(correct) < config.popularity_ratio * typo_count:
        return Judgement(False, RULE_POPULARITY)
    if not is_correct_query(correct, vocabulary, index):
        return Judgement(False, RULE_VOCABULARY)
    if is_correct_query(typo, vocabulary, index):
        return Judgement(False, RULE_KNOWN_TOKENS)
    return ACCEPT


@dataclass
class MiningReport:
    judged: int = 0
    accepted: int = 0
    rejected_by_rule: Counter[str] = field(default_factory=Counter)
    malformed_records: int = 0

    def record(self, judgement: Judgement) -> None:
        self.judged += 1
        if judgement.accepted:
            self.accepted += 1
        else:
            self.rejected_by_rule[judgement.rule_id] += 1

    def to_dict(self) -> dict:
        return {
            "judged": self.judged,
            "accepted": self.accepted,
            "rejected_by_rule": {r: self.rejected_by_rule[r]
                                 for r in ALL_RULES if self.rejected_by_rule[r]},
            "malformed_records": self.malformed_records,
        }


def mine_pairs(records: Iterable[QueryLogRecord],
               vocabulary: frozenset[str] | set[str],
               config: MiningConfig | None = None,
               index: PopularityIndex | None = None,
               ) -> tuple[set[TypoPair], MiningReport]:
    """Mine accepted typo pairs from a query log.

    Every unordered pair of queries fired by the same user within
    ``config.window_size`` subsequent queries is judged in both
    orientations (either element may be the typo).  Accepted pairs are
    deduplicated globally; the report counts individual judgements.
    """
    config = config or MiningConfig()
    config.validate()
    records = list(records)
    if index is None:
        index = build_popularity_index(records, config.top_token_count)

    per_user: dict[str, list[QueryLogRecord]] = {}
    for record in records:
        per_user.setdefault(record.user_id, []).append(record)

    pairs: set[TypoPair] = set()
    report = MiningReport()
    for user_records in per_user.values():
        # Stable sort: stream order is kept for equal timestamps.
        user_records.sort(key=lambda r: r.timestamp)
        window: deque[str] = deque(maxlen=config.window_size - 1)
        for record in user_records:
            query = record.query
            for previous in window:
                for typo, correct in ((previous, query), (query, previous)):
                    judgement = judge_candidate(typo, correct, vocabulary,
                                                index, config)
                    report.record(judgement)
                    if judgement.accepted:
                        pairs.add(TypoPair(typo, correct))
            window.append(query)
    return pairs, report


# ---------------------------------------------------------------------------
# File formats

def read_query_log(path: str | Path) -> tuple[list[QueryLogRecord], int]:
    """Parse a ``user_id \\t timestamp_ms \\t query`` log file.

    Returns the well-formed records plus a count of skipped malformed
    lines (wrong field count, non-integer timestamp, or empty query).
    """
    records: list[QueryLogRecord] = []
    malformed = 0
    try:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                fields = line.split("\t")
                if len(fields) != 3:
                    malformed += 1
                    continue
                user_id, raw_ts, query = fields
                query = query.strip()
                if not user_id or not query:
                    malformed += 1
                    continue
                try:
                    timestamp = int(raw_ts)
                except ValueError:
                    malformed += 1
                    continue
                records.append(QueryLogRecord(user_id, timestamp, query))
    except OSError as exc:
        raise MiningError(f"cannot read query log {path}: {exc}") from exc
    return records, malformed


def read_vocabulary(path: str | Path) -> frozenset[str]:
    """Load a vocabulary file: one token per line, blanks ignored."""
    try:
        with open(path, encoding="utf-8") as fh:
            return frozenset(t for t in (line.strip() for line in fh) if t)
    except OSError as exc:
        raise MiningError(f"cannot read vocabulary {path}: {exc}") from exc


def write_pairs(path: str | Path, pairs: Iterable[TypoPair]) -> None:
    """Write ``typo \\t correct`` lines, sorted for reproducibility."""
    with open(path, "w", encoding="utf-8") as fh:
        for pair in sorted(pairs):
            fh.write(f"{pair.typo}\t{pair.correct}\n")


def read_pairs(path: str | Path) -> list[TypoPair]:
    pairs: list[TypoPair] = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise MiningError(f"{path}:{n}: expected 'typo<TAB>correct'")
            pairs.append(TypoPair(fields[0], fields[1]))
    return pairs


def iter_pair_records(pairs: Iterable[TypoPair]) -> Iterator[tuple[str, str]]:
    for pair in pairs:
        yield pair.typo, pair.correct
