"""Cue-based retrieval: working memory as the cue, graph-guided search.

One retrieval pass scores every short-term engram against the working-memory
batch, keeps the top n_stm_rem, seeds long-term search with each survivor's
strongest outgoing edge, expands the frontier level by level up to n_depth,
and finally keeps the top n_ltm_rem of the explored set by the same
correlation score.

Scoring: corr(a, b) = exp(-||a - b||^2); an engram's score is the mean of
its correlation with every working-memory vector. Scores are not invariant
under rescaling the inputs; only the rank order matters here.

Exploration follows synchronized frontier expansion: at each level every
frontier member picks its single strongest positive edge into long-term
memory, excluding everything found at previous levels. Picks made within
the same level do not exclude each other; duplicates collapse in the
union. Zero-weight edges are never traversed, since a zero count carries
no associative evidence.

Determinism: all ties (top-k and argmax) break toward the smaller engram
id, i.e. the older engram. Retrieval never mutates the state; results are
reproducible from (state, config) alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import SequencingError, ShapeError
from .store import MemoryState


@dataclass(frozen=True)
class RetrievalResult:
    """Outcome of one retrieval pass.

    wm        the cue batch, in creation order
    stm_rem   retrieved short-term ids, descending score then ascending id
    ltm_rem   retrieved long-term ids, same ordering
    ltm_found everything reached by graph exploration (diagnostic), ascending id
    scores    correlation score for every retrieved (rem) id
    """

    wm: list[int]
    stm_rem: list[int]
    ltm_rem: list[int]
    ltm_found: list[int]
    scores: dict[int, float] = field(default_factory=dict)

    @property
    def rem(self) -> list[int]:
        """All retrieved engrams: short-term first, then long-term."""
        return self.stm_rem + self.ltm_rem

    @property
    def act(self) -> list[int]:
        """The activated set: working memory plus everything retrieved."""
        return self.wm + self.stm_rem + self.ltm_rem


def correlation(a, b) -> float:
    """exp(-||a - b||^2): 1 iff the vectors coincide, decaying with L2
    distance."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeError(f"dimension mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    return float(np.exp(-np.dot(diff, diff)))


def tier_correlations(state: MemoryState, tier_ids) -> dict[int, float]:
    """Mean correlation of each candidate with the working-memory batch."""
    if not state._wm:
        raise SequencingError("working memory is empty; no retrieval cue")
    tier_ids = list(tier_ids)
    if not tier_ids:
        return {}
    idx = np.asarray(tier_ids, dtype=np.int64)
    cand = state._vectors[idx]
    wm = state._vectors[np.asarray(state._wm, dtype=np.int64)]
    vals = _kernels.corr_means(cand, wm)
    return dict(zip(tier_ids, vals.tolist()))


def select_top_k(scores: dict[int, float], k: int) -> list[int]:
    """The k highest-scoring ids, descending score, ties to the smaller id.

    Returns everything when there are fewer than k candidates.
    """
    if not scores:
        return []
    ids = np.fromiter(scores.keys(), dtype=np.int64, count=len(scores))
    vals = np.fromiter(scores.values(), dtype=np.float64, count=len(scores))
    order = np.lexsort((ids, -vals))
    return ids[order[:k]].tolist()


def seed_ltm(state: MemoryState, stm_rem) -> list[int]:
    """Strongest long-term neighbor of each retrieved short-term engram.

    Engrams with no positive edge into long-term memory contribute
    nothing; duplicates collapse (the seed set is a set). Order follows
    first appearance along stm_rem.
    """
    if not state._ltm:
        return []
    nobody = np.zeros(state._next_id, dtype=np.bool_)
    seeds: list[int] = []
    seen: set[int] = set()
    for engram_id in stm_rem:
        row = state._rows.get(engram_id)
        if row is None:
            continue
        best = _kernels.best_ltm_neighbor(
            row[0], row[1], row[2], state._tier, nobody)
        if best >= 0 and best not in seen:
            seen.add(best)
            seeds.append(int(best))
    return seeds


def explore_ltm(state: MemoryState, init, depth: int) -> list[int]:
    """Frontier-expansion search over the long-term graph.

    Level 0 is `init`; at level k each member of level k-1 picks its single
    strongest positive edge to a long-term engram not found at levels
    < k. Returns the union of all levels, ascending by id. The result size
    is bounded by len(init) * (depth + 1).
    """
    init = [int(i) for i in init]
    if not init:
        return []
    found_mask = np.zeros(state._next_id, dtype=np.bool_)
    idx = np.asarray(init, dtype=np.int64)
    found_mask[idx] = True
    found: list[int] = list(init)
    frontier = sorted(init)
    for _ in range(depth):
        picks: set[int] = set()
        for engram_id in frontier:
            row = state._rows.get(engram_id)
            if row is None:
                continue
            best = _kernels.best_ltm_neighbor(
                row[0], row[1], row[2], state._tier, found_mask)
            if best >= 0:
                picks.add(int(best))
        if not picks:
            break
        frontier = sorted(picks)
        for engram_id in frontier:
            found_mask[engram_id] = True
        found.extend(frontier)
    return sorted(found)


def retrieve(state: MemoryState) -> RetrievalResult:
    """One full retrieval pass against the current working-memory cue.

    Pure read: the state is never mutated, and identical states produce
    identical results.
    """
    if not state._wm:
        raise SequencingError("working memory is empty; populate it first")
    cfg = state.config
    c_stm = tier_correlations(state, state.stm_ids())
    stm_rem = select_top_k(c_stm, cfg.n_stm_rem)
    seeds = seed_ltm(state, stm_rem)
    ltm_found = explore_ltm(state, seeds, cfg.n_depth)
    c_ltm = tier_correlations(state, ltm_found)
    ltm_rem = select_top_k(c_ltm, cfg.n_ltm_rem)
    scores = {i: c_stm[i] for i in stm_rem}
    scores.update((i, c_ltm[i]) for i in ltm_rem)
    return RetrievalResult(
        wm=state.wm_ids(),
        stm_rem=stm_rem,
        ltm_rem=ltm_rem,
        ltm_found=ltm_found,
        scores=scores,
    )
