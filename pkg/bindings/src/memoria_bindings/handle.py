from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import wraps

import numpy as np

from memoria import (Config, ContractError, MemoriaError, PhaseError,
                     ShapeError, new_engine)
from memoria.lifecycle import (advance_tiers, apply_contributions,
                               decay_and_prune, record_cofiring)
from memoria.retrieval import RetrievalResult, retrieve
from memoria.snapshot import save_snapshot


class ConcurrencyError(MemoriaError, RuntimeError):
    """A handle was entered from two callers at once."""


@dataclass(frozen=True)
class RetrievedBatch:
    """One retrieval, tier by tier, in the engine's deterministic order.

    Vector arrays are (k, dim) float64 copies; score arrays align with the
    id arrays. Working memory carries no scores (it is the cue itself).
    """

    wm_ids: np.ndarray
    wm_vectors: np.ndarray
    stm_ids: np.ndarray
    stm_vectors: np.ndarray
    stm_scores: np.ndarray
    ltm_ids: np.ndarray
    ltm_vectors: np.ndarray
    ltm_scores: np.ndarray

    @property
    def rem_size(self) -> int:
        """Number of retrieved engrams awaiting contribution weights."""
        return len(self.stm_ids) + len(self.ltm_ids)


def _exclusive(method):
    @wraps(method)
    def wrapper(self, *args, **kwargs):
        if not self._lock.acquire(blocking=False):
            raise ConcurrencyError(
                "handle is in use by another caller; handles are not "
                "shareable across concurrent callers")
        try:
            return method(self, *args, **kwargs)
        finally:
            self._lock.release()
    return wrapper


class EngineHandle:
    """One engine instance behind the two-phase protocol."""

    def __init__(self, config: Config):
        self._state = new_engine(config)
        self._pending: RetrievalResult | None = None
        self._lock = threading.Lock()

    @property
    def config(self) -> Config:
        return self._state.config

    @_exclusive
    def retrieve(self, vectors) -> RetrievedBatch:
        """Phase 1: push a cue batch and search both memory tiers.

        `vectors` must be a (n, dim) array with n <= n_wm. Leaves the
        retrieval pending until feedback_and_step supplies the
        contribution weights.
        """
        if self._pending is not None:
            raise PhaseError(
                "previous retrieval still pending; call feedback_and_step")
        arr = np.ascontiguousarray(vectors, dtype=np.float64)
        if arr.ndim != 2:
            raise ShapeError(f"expected a 2-D array, got shape {arr.shape}")
        state = self._state
        state.add_working_memory(arr)
        result = retrieve(state)
        self._pending = result

        def gather(ids):
            if ids:
                return state._vectors[np.asarray(ids, dtype=np.int64)].copy()
            return np.empty((0, state.config.dim))

        return RetrievedBatch(
            wm_ids=np.asarray(result.wm, dtype=np.int64),
            wm_vectors=gather(result.wm),
            stm_ids=np.asarray(result.stm_rem, dtype=np.int64),
            stm_vectors=gather(result.stm_rem),
            stm_scores=np.asarray([result.scores[i] for i in result.stm_rem]),
            ltm_ids=np.asarray(result.ltm_rem, dtype=np.int64),
            ltm_vectors=gather(result.ltm_rem),
            ltm_scores=np.asarray([result.scores[i] for i in result.ltm_rem]),
        )

    @_exclusive
    def feedback_and_step(self, weights) -> dict:
        """Phase 2: supply one contribution weight per retrieved engram
        (short-term first, then long-term, matching the returned order)
        and complete the memorize & forget stage.

        A wrong-length weight vector raises without mutating the engine.
        """
        if self._pending is None:
            raise PhaseError("no pending retrieval; call retrieve first")
        result = self._pending
        w = np.ascontiguousarray(weights, dtype=np.float64).reshape(-1)
        rem = result.rem
        if w.shape[0] != len(rem):
            raise ShapeError(
                f"expected {len(rem)} weights for the retrieved set, "
                f"got {w.shape[0]}")
        if (w < 0).any():
            raise ContractError("contribution weights must be non-negative")
        state = self._state
        record_cofiring(state, result.act)
        apply_contributions(state, rem, dict(zip(rem, w.tolist())))
        pruned = decay_and_prune(state)
        advance_tiers(state)
        state.step += 1
        self._pending = None
        return {
            "pruned_count": len(pruned),
            "stm_size": state.stm_size(),
            "ltm_size": state.ltm_size(),
            "total_lifespan": state.total_lifespan(),
        }

    @_exclusive
    def reset(self) -> None:
        """Clear all memory; ids stay unique, a pending retrieval is
        discarded."""
        self._state.reset()
        self._pending = None

    @_exclusive
    def snapshot(self, path) -> None:
        """Write a checkpoint interchangeable with the engine CLI's."""
        save_snapshot(self._state, path)

    @_exclusive
    def stats(self) -> dict:
        state = self._state
        return {
            "step": state.step,
            "wm_size": state.wm_size(),
            "stm_size": state.stm_size(),
            "ltm_size": state.ltm_size(),
            "total_lifespan": state.total_lifespan(),
        }


def create(config_mapping) -> EngineHandle:
    """Build a handle from a plain mapping of config keys."""
    return EngineHandle(Config.from_dict(dict(config_mapping)))
