"""Brute-force references for differential testing.

Everything here is deliberately slow and straight-line: plain Python
loops, no shared helper code with the engine's retrieval or lifecycle
beyond the public data accessors and result types. Duplication is the
point; the engine is checked against these, never the other way around.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import SequencingError
from .lifecycle import (StepReport, advance_tiers, apply_contributions,
                        decay_and_prune, record_cofiring)
from .retrieval import RetrievalResult, retrieve
from .store import MemoryState
from .trace import TraceLog


def _naive_mean_corr(vec, wm_vecs) -> float:
    total = 0.0
    for w in wm_vecs:
        s = 0.0
        for x, y in zip(vec, w):
            d = x - y
            s += d * d
        total += math.exp(-s)
    return total / len(wm_vecs)


def _naive_top_k(pairs, k):
    ranked = sorted(pairs, key=lambda p: (-p[1], p[0]))
    return [i for i, _ in ranked[:k]]


def reference_retrieve(state: MemoryState) -> RetrievalResult:
    """Same contract as retrieval.retrieve, recoded naively."""
    wm_ids = state.wm_ids()
    if not wm_ids:
        raise SequencingError("working memory is empty")
    cfg = state.config
    wm_vecs = [state.vector(i).tolist() for i in wm_ids]

    stm_scores = [(i, _naive_mean_corr(state.vector(i).tolist(), wm_vecs))
                  for i in state.stm_ids()]
    stm_rem = _naive_top_k(stm_scores, cfg.n_stm_rem)

    ltm_ids = state.ltm_ids()
    seeds: list[int] = []
    for i in stm_rem:
        fires = state.engram(i).fire_count
        best_id = None
        best_weight = 0.0
        if fires > 0:
            for j in ltm_ids:
                c = state.count(i, j)
                if c > 0:
                    weight = c / fires
                    if weight > best_weight:
                        best_weight = weight
                        best_id = j
        if best_id is not None and best_id not in seeds:
            seeds.append(best_id)

    found = set(seeds)
    frontier = sorted(seeds)
    for _ in range(cfg.n_depth):
        level: set[int] = set()
        for i in frontier:
            fires = state.engram(i).fire_count
            best_id = None
            best_weight = 0.0
            for j in ltm_ids:
                if j in found:
                    continue
                c = state.count(i, j)
                if c > 0:
                    weight = c / fires
                    if weight > best_weight:
                        best_weight = weight
                        best_id = j
            if best_id is not None:
                level.add(best_id)
        if not level:
            break
        found |= level
        frontier = sorted(level)
    ltm_found = sorted(found)

    ltm_scores = [(i, _naive_mean_corr(state.vector(i).tolist(), wm_vecs))
                  for i in ltm_found]
    ltm_rem = _naive_top_k(ltm_scores, cfg.n_ltm_rem)

    scores = dict(stm_scores + ltm_scores)
    return RetrievalResult(
        wm=wm_ids,
        stm_rem=stm_rem,
        ltm_rem=ltm_rem,
        ltm_found=ltm_found,
        scores={i: scores[i] for i in stm_rem + ltm_rem},
    )


def full_ltm_search(state: MemoryState, k: int) -> list[int]:
    """Exhaustive ablation: top-k correlation over the entire long-term
    memory, ignoring the graph."""
    wm_ids = state.wm_ids()
    if not wm_ids:
        raise SequencingError("working memory is empty")
    wm_vecs = [state.vector(i).tolist() for i in wm_ids]
    pairs = [(i, _naive_mean_corr(state.vector(i).tolist(), wm_vecs))
             for i in state.ltm_ids()]
    return _naive_top_k(pairs, k)


def random_wire_step(
    state: MemoryState,
    vectors,
    contribution_source,
    rng: np.random.Generator,
    trace=None,
) -> StepReport:
    """Ablated step: the long-term engrams that get wired are sampled
    uniformly instead of being the retrieved ones.

    The total count increase is controlled: the random target set has the
    same size as the retrieved long-term set, so the activated set used
    for counting keeps its cardinality. Retrieval itself and lifespan
    bookkeeping are untouched. With an empty long-term memory this
    degenerates to the normal step.
    """
    created = state.add_working_memory(vectors)
    result = retrieve(state)
    weights = contribution_source(result)
    ltm_ids = state.ltm_ids()
    k = len(result.ltm_rem)
    if k:
        pick = rng.choice(len(ltm_ids), size=k, replace=False)
        targets = sorted(ltm_ids[p] for p in pick)
    else:
        targets = []
    record_cofiring(state, result.wm + result.stm_rem + targets)
    increments = apply_contributions(state, result.rem, weights)
    pruned = decay_and_prune(state)
    promoted_to_stm, promoted_to_ltm = advance_tiers(state)
    report = StepReport(
        step=state.step,
        created=created,
        retrieved=result,
        increments=increments,
        pruned=pruned,
        promoted_to_stm=promoted_to_stm,
        promoted_to_ltm=promoted_to_ltm,
    )
    state.step += 1
    if trace is not None:
        trace.write_step(report, state)
    return report


def recount_from_trace(log: TraceLog) -> dict[tuple[int, int], int]:
    """Rebuild the full count table (diagonal included) by replaying the
    per-step activated sets of a trace. Reset markers clear the table."""
    counts: dict[tuple[int, int], int] = {}
    for record in log.records:
        if record.reset_before:
            counts.clear()
        act = record.act
        for i in act:
            for j in act:
                key = (i, j)
                counts[key] = counts.get(key, 0) + 1
    return counts


def compare_counts(state: MemoryState,
                   counts: dict[tuple[int, int], int]) -> list[str]:
    """Differences between an engine's live counts and a reconstructed
    table, as human-readable strings; empty means exact agreement."""
    live = set(state.live_ids())
    engine: dict[tuple[int, int], int] = {}
    for i in live:
        fires = state.engram(i).fire_count
        if fires:
            engine[(i, i)] = fires
        for j, c in state.cofire_items(i):
            engine[(i, j)] = c
    replayed = {pair: c for pair, c in counts.items()
                if pair[0] in live and pair[1] in live and c}
    problems = []
    for pair in sorted(set(engine) | set(replayed)):
        a = engine.get(pair, 0)
        b = replayed.get(pair, 0)
        if a != b:
            problems.append(f"pair {pair}: engine={a} trace={b}")
    return problems
