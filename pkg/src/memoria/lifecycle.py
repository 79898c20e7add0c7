"""Memorize & forget: counts, reinforcement, decay, pruning, promotion.

After retrieval and exploitation, one step runs in this fixed order:

1. co-firing counts +1 for every ordered pair over the activated set
2. retrieved engrams gain lifespan proportional to their contribution
3. every engram loses 1.0 lifespan (the new batch included)
4. engrams at lifespan <= 0 are removed, counts included
5. the working-memory batch moves into short-term memory
6. short-term overflow moves, oldest first, into long-term memory

Because increments land before decay, a just-reinforced engram nets
its increment minus one for the step; because new engrams decay in their
creation step, surviving into short-term memory requires an initial
lifespan above 1.

Reinforcement conserves mass: the increments of one step always sum to
|retrieved| * alpha. All-zero contribution weights fall back to uniform,
preserving that conservation law instead of dividing zero by zero.

The contribution callback is the exploitation boundary: the engine never
scores usefulness itself. The callback runs synchronously inside `step`
and must not mutate the engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import ContractError, UnknownEngramError
from .retrieval import RetrievalResult, retrieve
from .store import MemoryState, Tier

# Contribution weights: one non-negative weight per retrieved engram,
# keyed exactly by the step's retrieved set.
ContributionWeights = Mapping[int, float]

ContributionSource = Callable[[RetrievalResult], ContributionWeights]


@dataclass(frozen=True)
class StepReport:
    """Everything one step did, in trace-ready form."""

    step: int
    created: list[int]
    retrieved: RetrievalResult
    increments: dict[int, float]
    pruned: list[int]
    promoted_to_stm: list[int]
    promoted_to_ltm: list[int]


def record_cofiring(state: MemoryState, act) -> None:
    """Count one co-firing of every ordered pair over `act`, diagonal
    included (each member's fire count rises by one)."""
    act = list(act)
    if not act:
        return
    if len(set(act)) != len(act):
        raise ContractError("activated set contains duplicate ids")
    for engram_id in act:
        if not state.is_live(engram_id):
            raise UnknownEngramError(engram_id)
    state._bump_cofiring(np.asarray(sorted(act), dtype=np.int64))


def apply_contributions(
    state: MemoryState, rem, weights: ContributionWeights,
) -> dict[int, float]:
    """Extend lifespans of the retrieved set by contribution-weighted
    increments; returns id -> increment in `rem` order.

    increment_i = weight_i / sum(weights) * len(rem) * alpha, so the
    increments sum to len(rem) * alpha exactly (up to float tolerance).
    """
    rem = list(rem)
    if set(weights) != set(rem):
        raise ContractError(
            "contribution weights must be keyed exactly by the retrieved set")
    if not rem:
        return {}
    w = np.asarray([float(weights[i]) for i in rem])
    if (w < 0).any():
        raise ContractError("contribution weights must be non-negative")
    total = w.sum()
    if total == 0.0:
        w = np.ones(len(rem))
        total = float(len(rem))
    scale = len(rem) * state.config.alpha / total
    increments = w * scale
    state._lifespan[np.asarray(rem, dtype=np.int64)] += increments
    return dict(zip(rem, increments.tolist()))


def decay_and_prune(state: MemoryState) -> list[int]:
    """Subtract 1.0 lifespan from every engram and remove those at 0 or
    less. Returns removed ids in canonical live order."""
    live = state.live_ids()
    if not live:
        return []
    idx = np.asarray(live, dtype=np.int64)
    state._lifespan[idx] -= 1.0
    dead = state._lifespan[idx] <= 0.0
    if not dead.any():
        return []
    pruned = idx[dead].tolist()
    pruned_set = set(pruned)
    stm_hit = False
    for engram_id in pruned:
        tier = state._tier[engram_id]
        state._tier[engram_id] = -1
        state._rows.pop(engram_id, None)
        if tier == Tier.WORKING:
            state._wm.remove(engram_id)
        elif tier == Tier.LONG_TERM:
            state._ltm.discard(engram_id)
        else:
            stm_hit = True
    if stm_hit:
        survivors = [i for i in state._stm if i not in pruned_set]
        state._stm.clear()
        state._stm.extend(survivors)
    return pruned


def advance_tiers(state: MemoryState) -> tuple[list[int], list[int]]:
    """Append the working batch to short-term memory in creation order,
    then move short-term overflow, oldest first, into long-term memory.

    Returns (moved to short-term, promoted to long-term).
    """
    moved = list(state._wm)
    if moved:
        state._tier[np.asarray(moved, dtype=np.int64)] = int(Tier.SHORT_TERM)
        state._stm.extend(moved)
        state._wm.clear()
    promoted: list[int] = []
    while len(state._stm) > state.config.stm_capacity:
        engram_id = state._stm.popleft()
        state._tier[engram_id] = int(Tier.LONG_TERM)
        state._ltm.add(engram_id)
        promoted.append(engram_id)
    return moved, promoted


def step(
    state: MemoryState,
    vectors,
    contribution_source: ContributionSource,
    trace=None,
) -> StepReport:
    """Run one full engine step: create, retrieve, exploit (via the
    callback), memorize and forget. Appends one trace record when a trace
    writer is given."""
    created = state.add_working_memory(vectors)
    result = retrieve(state)
    weights = contribution_source(result)
    record_cofiring(state, result.act)
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


def uniform_contributions(result: RetrievalResult) -> dict[int, float]:
    """The simplest exploitation model: every retrieved engram contributed
    equally."""
    return {i: 1.0 for i in result.rem}
