"""Tests for query-log mining: rule cascade, windows, popularity index."""

import random
from collections import Counter

import pytest

import mining_fixture
from typosmith.mining import (
    MiningConfig,
    MiningError,
    PopularityIndex,
    QueryLogRecord,
    TypoPair,
    build_popularity_index,
    is_correct_query,
    judge_candidate,
    mine_pairs,
    read_pairs,
    read_query_log,
    read_vocabulary,
    write_pairs,
)


def _records(*queries_by_user):
    out = []
    for u, queries in queries_by_user:
        out.extend(QueryLogRecord(u, i, q) for i, q in enumerate(queries))
    return out


def _index(*queries, k=5):
    return build_popularity_index(
        [QueryLogRecord("u", i, q) for i, q in enumerate(queries)], k)


# ---------------------------------------------------------------------------
# Popularity index


def test_index_counts_queries_and_tokens():
    index = build_popularity_index(
        [QueryLogRecord("u1", 0, "jack"), QueryLogRecord("u2", 0, "jack"),
         QueryLogRecord("u1", 1, "jak")], k=10)
    assert index.query_counts == Counter({"jack": 2, "jak": 1})
    assert index.token_counts == Counter({"jack": 2, "jak": 1})


def test_index_empty_stream():
    index = build_popularity_index([], k=10)
    assert index.query_counts == Counter()
    assert index.top_tokens == ()


def test_index_top_k_selection():
    queries = [t for t in "abcdefghijklmnopqrst"]
    weighted = []
    for rank, token in enumerate(queries):
        weighted.extend([token] * (rank + 1))  # 't' most frequent
    index = _index(*weighted, k=5)
    assert set(index.top_tokens) == {"p", "q", "r", "s", "t"}
    assert len(index.top_tokens) == 5


def test_index_top_k_tie_break_is_lexicographic():
    index = _index("b", "a", "c", "a", "b", "c", "d", k=2)
    # a, b, c all tie at 2; lexicographic order decides
    assert index.top_tokens == ("a", "b")


def test_index_multiword_queries_split_into_tokens():
    index = _index("john smith", "john", k=10)
    assert index.query_counts == Counter({"john smith": 1, "john": 1})
    assert index.token_counts == Counter({"john": 2, "smith": 1})


# ---------------------------------------------------------------------------
# Correct-query test


def test_is_correct_query_vocabulary():
    index = _index(k=0)
    assert is_correct_query("john smith", {"john", "smith"}, index)
    assert not is_correct_query("john xqzt", {"john"}, index)


def test_is_correct_query_top_tokens():
    index = _index(*["acme"] * 3, k=1)
    assert is_correct_query("acme", frozenset(), index)
    assert not is_correct_query("emca", frozenset(), index)


def test_is_correct_query_empty_is_not_correct():
    assert not is_correct_query("   ", {"john"}, _index(k=0))


# ---------------------------------------------------------------------------
# Rule cascade


@pytest.fixture(scope="module")
def cascade_env():
    # "jessica" popular (30 vs 1 for the typo), in vocabulary
    queries = ["jessicca"] + ["jessica"] * 30 + ["jack", "jak"]
    return (_index(*queries, k=0), frozenset({"jessica", "jack", "jim"}),
            MiningConfig())


def test_judge_prefix_reject(cascade_env):
    index, vocab, config = cascade_env
    judgement = judge_candidate("jac", "jack", vocab, index, config)
    assert not judgement.accepted and judgement.rule_id == "prefix"


def test_judge_containment_reject_beats_distance(cascade_env):
    index, vocab, config = cascade_env
    # distance("jimmy", "jim") is 2, but containment is reported
    judgement = judge_candidate("jimmy", "jim", vocab, index, config)
    assert judgement.rule_id == "containment"


def test_judge_accepts_popular_vocab_correction(cascade_env):
    index, vocab, config = cascade_env
    assert judge_candidate("jessicca", "jessica", vocab, index, config).accepted


def test_judge_identity_reject(cascade_env):
    index, vocab, config = cascade_env
    assert judge_candidate("jack", "jack", vocab, index,
                           config).rule_id == "identity"


def test_judge_forbidden_chars(cascade_env):
    index, vocab, config = cascade_env
    for typo in ("j@ck", "j_ck", "j#ck", "j\\ck"):
        assert judge_candidate(typo, "jack", vocab, index,
                               config).rule_id == "forbidden_chars"
    # forbidden char on the *correct* side also rejects
    assert judge_candidate("jack", "j@ck", vocab, index,
                           config).rule_id == "forbidden_chars"


def test_judge_edit_distance_reject(cascade_env):
    index, vocab, config = cascade_env
    assert judge_candidate("boat", "obta", vocab, index,
                           config).rule_id == "edit_distance"


def test_judge_popularity_boundary():
    vocab = frozenset({"jessica"})
    config = MiningConfig(popularity_ratio=15)
    exactly = _index(*(["jessicca"] + ["jessica"] * 15), k=0)
    assert judge_candidate("jessicca", "jessica", vocab, exactly,
                           config).accepted
    below = _index(*(["jessicca"] + ["jessica"] * 14), k=0)
    assert judge_candidate("jessicca", "jessica", vocab, below,
                           config).rule_id == "popularity"


def test_judge_unseen_typo_counts_as_one():
    vocab = frozenset({"jessica"})
    index = _index(*["jessica"] * 15, k=0)
    assert judge_candidate("jessicca", "jessica", vocab, index,
                           MiningConfig()).accepted


def test_judge_known_token_typo_reject(cascade_env):
    index, vocab, config = cascade_env
    # "jim" -> "jack"? distance 4... craft distance-1 known-token case
    queries = ["jon smith"] + ["john smith"] * 20
    index = _index(*queries, k=0)
    vocab = frozenset({"jon", "john", "smith"})
    judgement = judge_candidate("jon smith", "john smith", vocab, index,
                                MiningConfig())
    assert judgement.rule_id == "typo_known_tokens"


def test_config_validation():
    with pytest.raises(MiningError):
        MiningConfig(window_size=1).validate()
    with pytest.raises(MiningError):
        MiningConfig(popularity_ratio=1.0).validate()
    with pytest.raises(MiningError):
        MiningConfig(max_edit_distance=0).validate()
    MiningConfig().validate()


# ---------------------------------------------------------------------------
# Windowed mining


def _vocab_env_records(n_correct=30):
    return _records(
        ("miner", ["jessicca", "jessica"]),
        *((f"bg{i}", ["jessica"]) for i in range(n_correct)))


# At fixture scale every distinct token ranks inside the default top-1500,
# which would mark the typo itself "known"; keep K at 1 so only the truly
# popular token qualifies, as it would at real log scale.
_SMALL_LOG_CONFIG = MiningConfig(top_token_count=1)


def test_mine_consecutive_pair_accepted():
    pairs, report = mine_pairs(_vocab_env_records(), {"jessica"},
                               _SMALL_LOG_CONFIG)
    assert pairs == {TypoPair("jessicca", "jessica")}
    assert report.accepted == 1
    assert report.judged == 2  # both orientations of the single pair


def test_mine_requires_same_user():
    records = _records(("u1", ["jessicca"]), ("u2", ["jessica"]),
                       *((f"bg{i}", ["jessica"]) for i in range(30)))
    pairs, report = mine_pairs(records, {"jessica"}, _SMALL_LOG_CONFIG)
    assert pairs == set()
    assert report.judged == 0


def test_mine_window_overflow_excludes_distant_pair():
    fillers = [f"z{i}" for i in range(10)]
    records = _records(("u", ["jessicca"] + fillers + ["jessica"]),
                       *((f"bg{i}", ["jessica"]) for i in range(30)))
    pairs, _ = mine_pairs(records, {"jessica"}, _SMALL_LOG_CONFIG)
    assert pairs == set()


def test_mine_window_boundary_includes_ninth_successor():
    fillers = [f"z{i}" for i in range(8)]
    records = _records(("u", ["jessicca"] + fillers + ["jessica"]),
                       *((f"bg{i}", ["jessica"]) for i in range(30)))
    pairs, _ = mine_pairs(records, {"jessica"}, _SMALL_LOG_CONFIG)
    assert pairs == {TypoPair("jessicca", "jessica")}


def test_mine_report_arithmetic():
    pairs, report = mine_pairs(mining_fixture.build_records(),
                               mining_fixture.VOCABULARY,
                               mining_fixture.CONFIG)
    assert report.judged == report.accepted + sum(
        report.rejected_by_rule.values())
    assert pairs  # at least one accept in the fixture


def test_mine_forty_record_fixture_exact():
    pairs, report = mine_pairs(mining_fixture.build_records(),
                               mining_fixture.VOCABULARY,
                               mining_fixture.CONFIG)
    assert pairs == mining_fixture.EXPECTED_PAIRS
    assert report.to_dict() == mining_fixture.EXPECTED_REPORT


def test_mine_is_order_invariant():
    records = mining_fixture.build_records()
    shuffled = records[:]
    random.Random(7).shuffle(shuffled)
    base_pairs, base_report = mine_pairs(records, mining_fixture.VOCABULARY,
                                         mining_fixture.CONFIG)
    shuf_pairs, shuf_report = mine_pairs(shuffled, mining_fixture.VOCABULARY,
                                         mining_fixture.CONFIG)
    assert shuf_pairs == base_pairs
    assert shuf_report.to_dict() == base_report.to_dict()


def test_mined_pairs_survive_rejudging():
    records = mining_fixture.build_records()
    config = mining_fixture.CONFIG
    index = build_popularity_index(records, config.top_token_count)
    pairs, _ = mine_pairs(records, mining_fixture.VOCABULARY, config,
                          index=index)
    for pair in pairs:
        assert judge_candidate(pair.typo, pair.correct,
                               mining_fixture.VOCABULARY, index,
                               config).accepted


def test_mined_pairs_have_no_forbidden_chars():
    pairs, _ = mine_pairs(mining_fixture.build_records(),
                          mining_fixture.VOCABULARY, mining_fixture.CONFIG)
    for pair in pairs:
        assert not set(pair.typo + pair.correct) & set("@_#\\")


# ---------------------------------------------------------------------------
# File formats


def test_read_query_log_counts_malformed(tmp_path):
    log = tmp_path / "log.tsv"
    log.write_text("u1\t100\tjack\n"
                   "too\tfew\n"
                   "u2\tnotanint\tjak\n"
                   "u3\t200\t   \n"
                   "\n"
                   "u4\t300\t  john  \n", encoding="utf-8")
    records, malformed = read_query_log(log)
    assert records == [QueryLogRecord("u1", 100, "jack"),
                       QueryLogRecord("u4", 300, "john")]
    assert malformed == 3


def test_read_query_log_missing_file(tmp_path):
    with pytest.raises(MiningError):
        read_query_log(tmp_path / "nope.tsv")


def test_pairs_round_trip_sorted(tmp_path):
    path = tmp_path / "pairs.tsv"
    pairs = {TypoPair("zeta", "zetta"), TypoPair("alxe", "alex")}
    write_pairs(path, pairs)
    assert read_pairs(path) == [TypoPair("alxe", "alex"),
                                TypoPair("zeta", "zetta")]


def test_read_vocabulary(tmp_path):
    path = tmp_path / "vocab.txt"
    path.write_text("john\n\n  smith \njohn\n", encoding="utf-8")
    assert read_vocabulary(path) == frozenset({"john", "smith"})


def test_fixture_log_round_trips_through_file(tmp_path):
    log = tmp_path / "fixture.tsv"
    mining_fixture.write_log(log)
    records, malformed = read_query_log(log)
    assert malformed == 0
    assert records == mining_fixture.build_records()
