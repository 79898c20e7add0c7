import math

import numpy as np
import pytest

from memoria import (SequencingError, ShapeError, correlation, explore_ltm,
                     new_engine, retrieve, seed_ltm, select_top_k,
                     snapshot_string, tier_correlations)
from memoria.lifecycle import advance_tiers, record_cofiring


def test_correlation_identical_vectors():
    assert correlation([1.0, 2.0], [1.0, 2.0]) == 1.0


def test_correlation_unit_distance():
    assert correlation([0.0, 0.0], [1.0, 0.0]) == pytest.approx(
        math.exp(-1.0), rel=1e-12)


def test_correlation_distance_two():
    assert correlation([0.0, 0.0], [2.0, 0.0]) == pytest.approx(
        math.exp(-4.0), rel=1e-12)


def test_correlation_dimension_mismatch():
    with pytest.raises(ShapeError):
        correlation([1.0], [1.0, 2.0])


def test_tier_correlations_self_is_one(engine):
    v = np.array([0.5, -1.0, 2.0])
    engine.add_working_memory([v])
    advance_tiers(engine)
    engine.add_working_memory([v])
    scores = tier_correlations(engine, engine.stm_ids())
    assert scores == {0: 1.0}


def test_tier_correlations_is_mean(engine):
    # candidate at distance giving known correlations to two cue vectors
    a = np.zeros(3)
    b = np.array([1.0, 0.0, 0.0])
    c = np.array([2.0, 0.0, 0.0])
    engine.add_working_memory([c])
    advance_tiers(engine)
    engine.add_working_memory([a, b])
    scores = tier_correlations(engine, engine.stm_ids())
    want = (math.exp(-4.0) + math.exp(-1.0)) / 2
    assert scores[0] == pytest.approx(want, rel=1e-12)


def test_tier_correlations_empty_candidates(engine):
    engine.add_working_memory(np.zeros((1, 3)))
    assert tier_correlations(engine, []) == {}


def test_tier_correlations_requires_cue(engine):
    with pytest.raises(SequencingError):
        tier_correlations(engine, [])


def test_select_top_k_orders_by_score():
    assert select_top_k({1: 0.9, 2: 0.5, 3: 0.7}, 2) == [1, 3]


def test_select_top_k_tie_prefers_older():
    assert select_top_k({2: 0.5, 1: 0.5}, 1) == [1]


def test_select_top_k_underfull():
    assert select_top_k({1: 0.2, 2: 0.1}, 5) == [1, 2]


def test_seed_ltm_empty_ltm(engine):
    engine.add_working_memory(np.zeros((2, 3)))
    advance_tiers(engine)
    engine.add_working_memory(np.zeros((1, 3)))
    assert seed_ltm(engine, engine.stm_ids()) == []


def test_seed_ltm_argmax_and_dedup():
    import memoria
    cfg = memoria.Config(dim=2, n_wm=3, stm_capacity=3, n_stm_rem=3,
                         n_ltm_rem=3, n_depth=1, initial_lifespan=50.0,
                         alpha=1.0)
    state = new_engine(cfg)
    x, y, z = state.add_working_memory(np.zeros((3, 2)))
    advance_tiers(state)
    a, b = state.add_working_memory(np.zeros((2, 2)))
    advance_tiers(state)  # x, y, z overflow into long-term
    # a -> x stronger than a -> y; b -> x only
    record_cofiring(state, [a, x])
    record_cofiring(state, [a, x])
    record_cofiring(state, [a, y])
    record_cofiring(state, [b, x])
    assert seed_ltm(state, [a]) == [x]
    assert seed_ltm(state, [a, b]) == [x]  # deduplicated
    assert seed_ltm(state, [b, a]) == [x]


def test_explore_depth_zero_returns_init():
    import memoria
    cfg = memoria.Config(dim=2, n_wm=2, stm_capacity=2, n_stm_rem=2,
                         n_ltm_rem=2, n_depth=0, initial_lifespan=50.0,
                         alpha=1.0)
    state = new_engine(cfg)
    a, b = state.add_working_memory(np.zeros((2, 2)))
    advance_tiers(state)
    state.add_working_memory(np.zeros((2, 2)))
    advance_tiers(state)
    assert explore_ltm(state, [b, a], 0) == [a, b]


def test_explore_walks_chain():
    import memoria
    cfg = memoria.Config(dim=2, n_wm=3, stm_capacity=2, n_stm_rem=2,
                         n_ltm_rem=3, n_depth=2, initial_lifespan=50.0,
                         alpha=1.0)
    state = new_engine(cfg)
    a, b, c = state.add_working_memory(np.zeros((3, 2)))
    advance_tiers(state)
    state.add_working_memory(np.zeros((2, 2)))
    advance_tiers(state)  # a, b, c in long-term
    record_cofiring(state, [a, b])
    record_cofiring(state, [b, c])
    record_cofiring(state, [b, c])
    assert explore_ltm(state, [a], 2) == [a, b, c]
    # exhaustion: from c, everything is already found
    assert explore_ltm(state, [a], 5) == [a, b, c]


def test_explore_respects_positive_weight_only():
    import memoria
    cfg = memoria.Config(dim=2, n_wm=2, stm_capacity=2, n_stm_rem=2,
                         n_ltm_rem=2, n_depth=3, initial_lifespan=50.0,
                         alpha=1.0)
    state = new_engine(cfg)
    a, b = state.add_working_memory(np.zeros((2, 2)))
    advance_tiers(state)
    state.add_working_memory(np.zeros((1, 2)))
    advance_tiers(state)
    assert explore_ltm(state, [a], 3) == [a]  # no edges at all


def test_retrieve_on_fresh_engine(engine):
    engine.add_working_memory(np.zeros((2, 3)))
    result = retrieve(engine)
    assert result.stm_rem == [] and result.ltm_rem == []
    assert result.wm == [0, 1]
    assert result.rem == [] and result.act == [0, 1]


def test_retrieve_requires_cue(engine):
    with pytest.raises(SequencingError):
        retrieve(engine)


def test_retrieve_is_pure_and_deterministic():
    from memoria.verify import build_random_state
    state = build_random_state(np.random.default_rng(7))
    before = snapshot_string(state)
    first = retrieve(state)
    second = retrieve(state)
    assert snapshot_string(state) == before
    assert first == second


def test_retrieve_result_invariants():
    from memoria.verify import build_random_state
    for seed in range(25):
        state = build_random_state(np.random.default_rng(seed))
        result = retrieve(state)
        stm, ltm = set(state.stm_ids()), set(state.ltm_ids())
        assert set(result.stm_rem) <= stm
        assert set(result.ltm_rem) <= set(result.ltm_found) <= ltm
        assert len(set(result.stm_rem)) == len(result.stm_rem)
        assert len(set(result.ltm_found)) == len(result.ltm_found)
        assert len(result.stm_rem) <= state.config.n_stm_rem
        assert len(result.ltm_rem) <= state.config.n_ltm_rem
        assert set(result.scores) == set(result.rem)
        bound = len(result.stm_rem) * (state.config.n_depth + 1)
        assert len(result.ltm_found) <= bound


def test_cue_dependence():
    # a cue equal to a stored engram's vector makes it score 1.0 and win
    import memoria
    cfg = memoria.Config(dim=4, n_wm=2, stm_capacity=8, n_stm_rem=1,
                         n_ltm_rem=1, n_depth=1, initial_lifespan=50.0,
                         alpha=1.0)
    state = new_engine(cfg)
    rng = np.random.default_rng(3)
    target = rng.standard_normal(4) * 0.1
    state.add_working_memory([target, rng.standard_normal(4) + 5.0])
    advance_tiers(state)
    state.add_working_memory([rng.standard_normal(4) + 3.0, target * 2])
    advance_tiers(state)
    state.add_working_memory([target, target])
    result = retrieve(state)
    assert result.stm_rem == [0]
    assert result.scores[0] == 1.0
