import pickle

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tlinkpred.graph_stream import EdgeStream, TemporalEdge
from tlinkpred.negsample import (
    NegativeQuery,
    NegativeSampleError,
    PairIndex,
    _draw_excluding,
    load_negative_files,
    load_negatives,
    load_tgb_negatives,
    sample_for_stream,
    sample_historical,
    sample_inductive,
    sample_random,
    write_negatives,
)

from synthetic import random_stream

S = 0
POS = TemporalEdge(S, 1, 10.0)


def test_random_only_possible_subset():
    q = sample_random({1, 2, 3, 4}, TemporalEdge(0, 2, 0), 3, 7)
    assert sorted(q.negatives) == [1, 3, 4]
    assert q.strategy == "random" and q.n_filled == 0


def test_random_universe_too_small():
    with pytest.raises(NegativeSampleError):
        sample_random({1, 2, 3}, TemporalEdge(0, 1, 0), 3, 0)


def test_random_is_deterministic():
    u = range(1000)
    assert sample_random(u, POS, 50, 3) == sample_random(u, POS, 50, 3)
    assert sample_random(u, POS, 50, 3) != sample_random(u, POS, 50, 4)


def test_historical_pool_equals_request():
    q = sample_historical({(S, 5), (S, 6)}, set(), POS, 2, 0)
    assert sorted(q.negatives) == [5, 6]
    assert q.n_filled == 0


def test_historical_no_partners_is_all_fill():
    q = sample_historical({(9, 5)}, set(), POS, 5, 0, universe=range(100))
    assert q.n_filled == 5 and len(q.negatives) == 5
    assert POS.dst not in q.negatives


def test_historical_short_pool_without_universe():
    with pytest.raises(NegativeSampleError):
        sample_historical(set(), set(), POS, 2, 0)


def test_historical_subset_of_enumerated_pool():
    train = {(S, d) for d in range(20, 30)} | {(3, 40)}
    current = {(S, 21)}
    q = sample_historical(train, current, POS, 5, 11)
    pool = {d for s, d in train if s == S and (s, d) not in current and d != POS.dst}
    assert set(q.negatives) <= pool and len(q.negatives) == 5
    assert q == sample_historical(train, current, POS, 5, 11)


def test_historical_excludes_current_step():
    q = sample_historical({(S, 5), (S, 6)}, {(S, 6)}, POS, 1, 0)
    assert q.negatives == (5,)


def test_inductive_examples():
    assert sample_inductive(set(), set(), POS, 4, 0, universe=range(50)).n_filled == 4
    assert sorted(sample_inductive({(S, 7), (S, 8)}, set(), POS, 2, 0).negatives) == [7, 8]
    pool = {(S, d) for d in range(30, 38)}
    q = sample_inductive(pool, set(), POS, 4, 2)
    assert set(q.negatives) <= {d for _, d in pool}
    assert q == sample_inductive(pool, set(), POS, 4, 2)


def test_fill_never_repeats_pool_members():
    q = sample_historical({(S, 2), (S, 3)}, set(), POS, 6, 1, universe=range(10))
    assert len(set(q.negatives)) == 6 and q.n_filled == 4
    assert {2, 3} <= set(q.negatives)


def test_query_invariants_enforced():
    with pytest.raises(NegativeSampleError):
        NegativeQuery(POS, (1, 2), "random")
    with pytest.raises(NegativeSampleError):
        NegativeQuery(POS, (2, 2), "random")


def test_draw_excluding_matches_enumeration():
    rng = np.random.default_rng(0)
    universe = np.arange(0, 200, 3)
    exclude = np.array([0, 3, 4, 90, 198, 500])
    allowed = set(universe.tolist()) - set(exclude.tolist())
    got = _draw_excluding(rng, universe, exclude, len(allowed))
    assert sorted(got.tolist()) == sorted(allowed)


def test_load_negatives(tmp_path):
    path = tmp_path / "neg.csv"
    path.write_text("src,dst,t,negatives\n0,1,5,2;3;4\n1,2,6.5,0;3\n")
    qs = load_negatives(path)
    assert len(qs) == 2
    assert qs[0].negatives == (2, 3, 4) and qs[1].positive == TemporalEdge(1, 2, 6.5)
    assert qs[0].strategy == "external"


def test_load_negatives_positive_in_negatives(tmp_path):
    path = tmp_path / "neg.csv"
    path.write_text("0,1,5,2;3\n0,1,6,1;3\n")
    with pytest.raises(NegativeSampleError, match="line 2"):
        load_negatives(path)


def test_load_negatives_malformed(tmp_path):
    path = tmp_path / "neg.csv"
    path.write_text("0,1,5,2;3\n0,1\n")
    with pytest.raises(NegativeSampleError, match="line 2"):
        load_negatives(path)


def test_load_negatives_empty(tmp_path):
    path = tmp_path / "neg.csv"
    path.write_text("")
    assert load_negatives(path) == []


def test_round_trip(tmp_path):
    s = random_stream(1, n_edges=50, n_nodes=30)
    qs = sample_for_stream(s, "random", 5, 0, range(40))
    path = tmp_path / "neg.csv"
    write_negatives(qs, path)
    back = load_negatives(path)
    assert [(q.positive, q.negatives) for q in back] == [(q.positive, q.negatives) for q in qs]


def test_tgb_pickle_adapter(tmp_path):
    path = tmp_path / "neg.pkl"
    with open(path, "wb") as fh:
        pickle.dump({(0, 1, 5.0): np.array([2, 3]), (4, 2, 6.0): np.array([7])}, fh)
    qs = load_tgb_negatives(path)
    assert [q.negatives for q in qs] == [(2, 3), (7,)]
    table = load_negative_files([path])
    assert table[(4, 2, 6.0)].negatives == (7,)


def test_sample_for_stream_rejects_unknown_strategy():
    with pytest.raises(NegativeSampleError):
        sample_for_stream(random_stream(0, n_edges=5), "popular", 2, 0, range(50))


def test_sample_for_stream_current_step_is_equal_timestamp():
    train = PairIndex([(0, 5), (0, 6), (0, 7)])
    s = EdgeStream.from_edges([(0, 1, 3.0), (0, 5, 3.0), (0, 6, 4.0)])
    qs = sample_for_stream(s, "historical", 1, 0, range(20), train)
    # (0,5) is active at t=3 so the first query can only use 6 or 7
    assert qs[0].negatives[0] in (6, 7)
    assert qs[2].negatives[0] in (5, 7)


def test_sample_for_stream_inductive_pool_is_eval_only_pairs():
    train = PairIndex([(0, 5)])
    s = EdgeStream.from_edges([(0, 5, 1.0), (0, 8, 2.0), (0, 9, 3.0)])
    qs = sample_for_stream(s, "inductive", 1, 0, range(20), train)
    assert qs[0].negatives[0] in (8, 9) and qs[0].n_filled == 0
    assert qs[1].negatives == (9,)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), strategy=st.sampled_from(["random", "historical", "inductive"]))
def test_stream_sampling_invariants(seed, strategy):
    s = random_stream(seed, n_edges=300, n_nodes=30, horizon=100)
    train, ev = s[:200], s[200:]
    tp = PairIndex.from_stream(train)
    universe = np.unique(s.dst)
    qs = sample_for_stream(ev, strategy, 5, seed, universe, tp, stream_tag=1)
    assert qs == sample_for_stream(ev, strategy, 5, seed, universe, tp, stream_tag=1)
    for q in qs:
        negs = list(q.negatives)
        assert len(negs) == 5 == len(set(negs))
        assert q.positive.dst not in negs
        sampled = negs[: 5 - q.n_filled]
        if strategy == "historical":
            assert all((q.positive.src, d) in tp for d in sampled)
        if strategy == "inductive":
            assert not any((q.positive.src, d) in tp for d in sampled)


@settings(max_examples=50, deadline=None)
@given(
    universe=st.sets(st.integers(0, 300), min_size=1, max_size=80),
    exclude=st.sets(st.integers(0, 300), max_size=40),
    seed=st.integers(0, 1000),
)
def test_draw_excluding_stays_in_allowed_set(universe, exclude, seed):
    u = np.array(sorted(universe), dtype=np.int64)
    e = np.array(sorted(exclude), dtype=np.int64)
    allowed = universe - exclude
    n = len(allowed) // 2
    got = _draw_excluding(np.random.default_rng(seed), u, e, n).tolist()
    assert len(set(got)) == n and set(got) <= allowed
