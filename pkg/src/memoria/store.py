"""Engram storage: the three memory tiers and the co-firing count graph.

An engram is one unit of memory: a real vector plus a lifespan, a tier, a
creation step and a fire count. Ids are allocated monotonically and never
reused, so creation order is recoverable from id order and ids stay
unambiguous across resets.

Storage layout: per-engram attributes live in id-indexed numpy columns
(grown geometrically), so an id is a direct array index. The co-firing
graph is a sparse adjacency structure: one sorted (neighbor id, count) row
per live engram, holding only off-diagonal pairs that actually co-fired.
Diagonal counts are the per-engram fire counts. Rows are pruned of dead
neighbors lazily (on the next merge or read); rows of deleted engrams are
dropped immediately, so deleted counts are unobservable through the API.

Directed edge weights are empirical conditional probabilities:
weight(i -> j) = count(i, j) / count(i, i), and 0 when i never fired.

Concurrency: single writer. Mutating calls need exclusive access to the
state; read-only calls may run concurrently with each other but not with
mutation.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .config import Config
from .errors import SequencingError, ShapeError, UnknownEngramError


class Tier(enum.IntEnum):
    WORKING = 0
    SHORT_TERM = 1
    LONG_TERM = 2


_TIER_NAMES = {Tier.WORKING: "wm", Tier.SHORT_TERM: "stm", Tier.LONG_TERM: "ltm"}
_TIER_FROM_NAME = {v: k for k, v in _TIER_NAMES.items()}


@dataclass(frozen=True)
class Engram:
    """Read-only view of one stored engram."""

    id: int
    vector: np.ndarray
    tier: Tier
    lifespan: float
    creation_step: int
    fire_count: int


class MemoryState:
    """Three memory tiers plus the co-firing graph of one engine instance.

    Working memory is the ordered batch created this step, short-term
    memory is a pure FIFO of recent engrams, long-term memory is an
    unbounded set. Tiers are disjoint: every live engram is in exactly one.
    """

    def __init__(self, config: Config):
        config.validate()
        self.config = config
        self.step = 0
        self._next_id = 0
        cap = 1024
        self._vectors = np.zeros((cap, config.dim))
        self._lifespan = np.zeros(cap)
        self._tier = np.full(cap, -1, dtype=np.int8)
        self._creation = np.zeros(cap, dtype=np.int64)
        self._fires = np.zeros(cap, dtype=np.int64)
        self._wm: list[int] = []
        self._stm: deque[int] = deque()
        self._ltm: set[int] = set()
        # engram id -> [neighbor ids (sorted int64), counts (int64), length]
        self._rows: dict[int, list] = {}

    # -- capacity ------------------------------------------------------------

    def _ensure_capacity(self, need: int) -> None:
        cap = self._tier.shape[0]
        if need <= cap:
            return
        new_cap = max(2 * cap, need)

        def grow(arr, fill=0):
            out = np.full((new_cap,) + arr.shape[1:], fill, dtype=arr.dtype)
            out[:cap] = arr
            return out

        self._vectors = grow(self._vectors)
        self._lifespan = grow(self._lifespan)
        self._tier = grow(self._tier, fill=-1)
        self._creation = grow(self._creation)
        self._fires = grow(self._fires)

    # -- mutation ------------------------------------------------------------

    def add_working_memory(self, vectors) -> list[int]:
        """Create one engram per vector in working memory; return their ids.

        The previous batch must already have been promoted out of working
        memory. Each engram starts with the configured initial lifespan and
        a fire count of 0 (it fires during the memorize phase of the same
        step).
        """
        if self._wm:
            raise SequencingError(
                "working memory is not empty; advance tiers before adding")
        arr = np.asarray(vectors, dtype=np.float64)
        if arr.size == 0:
            return []
        if arr.ndim != 2 or arr.shape[1] != self.config.dim:
            raise ShapeError(
                f"expected vectors of dimension {self.config.dim}, "
                f"got array of shape {arr.shape}")
        if arr.shape[0] > self.config.n_wm:
            raise ShapeError(
                f"{arr.shape[0]} vectors exceed working-memory size "
                f"{self.config.n_wm}")
        first = self._next_id
        n = arr.shape[0]
        self._ensure_capacity(first + n)
        ids = list(range(first, first + n))
        self._vectors[first:first + n] = arr
        self._lifespan[first:first + n] = self.config.initial_lifespan
        self._tier[first:first + n] = int(Tier.WORKING)
        self._creation[first:first + n] = self.step
        self._fires[first:first + n] = 0
        self._wm.extend(ids)
        self._next_id += n
        return ids

    def reset(self) -> None:
        """Delete all engrams and counts. The step counter and the id
        allocator are preserved, so ids stay globally unique."""
        self._tier[:self._next_id] = -1
        self._wm.clear()
        self._stm.clear()
        self._ltm.clear()
        self._rows.clear()

    # -- graph ---------------------------------------------------------------

    def _bump_cofiring(self, act_sorted: np.ndarray) -> None:
        """Increment counts for every ordered pair over `act_sorted`,
        diagonal included. `act_sorted` must be sorted, unique and live."""
        self._fires[act_sorted] += 1
        tier = self._tier
        for engram_id in act_sorted:
            row = self._rows.get(engram_id)
            if row is None:
                ids = np.empty(0, dtype=np.int64)
                counts = np.empty(0, dtype=np.int64)
                n = 0
            else:
                ids, counts, n = row
            new_ids, new_counts, new_n = _kernels.merge_row(
                ids, counts, n, act_sorted, engram_id, tier)
            self._rows[int(engram_id)] = [new_ids, new_counts, new_n]

    def count(self, i: int, j: int) -> int:
        """Raw co-firing count for the pair (i, j); the diagonal is the
        fire count. Raises for ids that are not live."""
        self._require_live(i)
        self._require_live(j)
        if i == j:
            return int(self._fires[i])
        row = self._rows.get(i)
        if row is None:
            return 0
        ids, counts, n = row
        pos = int(np.searchsorted(ids[:n], j))
        if pos < n and ids[pos] == j:
            return int(counts[pos])
        return 0

    def edge_weight(self, i: int, j: int) -> float:
        """Directed weight count(i, j) / count(i, i) in [0, 1].

        0 when i never fired (the conditional probability is undefined
        there; an unfired engram must never be preferred) or when the pair
        never co-fired.
        """
        self._require_live(i)
        self._require_live(j)
        fires = int(self._fires[i])
        if fires == 0:
            return 0.0
        if i == j:
            return 1.0
        row = self._rows.get(i)
        if row is None:
            return 0.0
        ids, counts, n = row
        pos = int(np.searchsorted(ids[:n], j))
        if pos < n and ids[pos] == j:
            return int(counts[pos]) / fires
        return 0.0

    def cofire_items(self, i: int) -> list[tuple[int, int]]:
        """Live off-diagonal neighbors of i as (id, count), ascending id."""
        self._require_live(i)
        row = self._rows.get(i)
        if row is None:
            return []
        ids, counts, n = row
        ids = ids[:n]
        counts = counts[:n]
        alive = self._tier[ids] >= 0
        return list(zip(ids[alive].tolist(), counts[alive].tolist()))

    # -- inspection ----------------------------------------------------------

    def _require_live(self, engram_id: int) -> None:
        if not (0 <= engram_id < self._next_id) or self._tier[engram_id] < 0:
            raise UnknownEngramError(engram_id)

    def is_live(self, engram_id: int) -> bool:
        return 0 <= engram_id < self._next_id and self._tier[engram_id] >= 0

    def engram(self, engram_id: int) -> Engram:
        self._require_live(engram_id)
        return Engram(
            id=engram_id,
            vector=self._vectors[engram_id].copy(),
            tier=Tier(int(self._tier[engram_id])),
            lifespan=float(self._lifespan[engram_id]),
            creation_step=int(self._creation[engram_id]),
            fire_count=int(self._fires[engram_id]),
        )

    def vector(self, engram_id: int) -> np.ndarray:
        self._require_live(engram_id)
        return self._vectors[engram_id].copy()

    def wm_ids(self) -> list[int]:
        return list(self._wm)

    def stm_ids(self) -> list[int]:
        """Short-term ids in FIFO (= creation) order, oldest first."""
        return list(self._stm)

    def ltm_ids(self) -> list[int]:
        """Long-term ids in ascending id order."""
        return sorted(self._ltm)

    def live_ids(self) -> list[int]:
        """All live ids in canonical order: WM batch, STM FIFO, LTM ascending."""
        return list(self._wm) + list(self._stm) + sorted(self._ltm)

    def total_lifespan(self) -> float:
        ids = self.live_ids()
        if not ids:
            return 0.0
        return float(np.sum(self._lifespan[np.asarray(ids, dtype=np.int64)]))

    def wm_size(self) -> int:
        return len(self._wm)

    def stm_size(self) -> int:
        return len(self._stm)

    def ltm_size(self) -> int:
        return len(self._ltm)

    def next_id(self) -> int:
        return self._next_id

    def tier_of(self, engram_id: int) -> Tier:
        self._require_live(engram_id)
        return Tier(int(self._tier[engram_id]))


def new_engine(config: Config) -> MemoryState:
    """Create an empty engine for the given configuration."""
    return MemoryState(config)


def tier_name(tier: Tier) -> str:
    return _TIER_NAMES[tier]


def tier_from_name(name: str) -> Tier:
    return _TIER_FROM_NAME[name]
