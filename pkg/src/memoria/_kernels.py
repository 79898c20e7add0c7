"""Hot numeric kernels, in two interchangeable backends.

The numba backend JIT-compiles the three inner loops that dominate a
simulation step: the correlation scan, the co-firing row merge, and the
per-node neighbor argmax used by graph exploration. The numpy backend is a
vectorized pure-numpy equivalent kept for environments without numba and
for debugging.

Backend selection, resolved once at import time:

    MEMORIA_BACKEND=numba   force numba (ImportError if unavailable)
    MEMORIA_BACKEND=numpy   force the pure-numpy fallback
    unset / auto            numba if importable, else numpy

Both backends implement the same contracts (identical selections and
integer results); floating-point correlation values may differ in the last
few ulps because summation order differs.
"""

from __future__ import annotations

import math
import os

import numpy as np

_requested = os.environ.get("MEMORIA_BACKEND", "auto").lower()
if _requested not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"MEMORIA_BACKEND must be auto, numba or numpy, got {_requested!r}")

if _requested in ("auto", "numba"):
    try:
        from numba import njit
        _have_numba = True
    except ImportError:
        if _requested == "numba":
            raise
        _have_numba = False
else:
    _have_numba = False

BACKEND = "numba" if _have_numba else "numpy"


# -- numpy fallback implementations -----------------------------------------

def _corr_means_numpy(cand: np.ndarray, wm: np.ndarray) -> np.ndarray:
    """Mean over wm rows of exp(-||cand_i - wm_j||^2), per candidate."""
    acc = np.zeros(cand.shape[0])
    for j in range(wm.shape[0]):
        d2 = ((cand - wm[j]) ** 2).sum(axis=1)
        acc += np.exp(-d2)
    return acc / wm.shape[0]


def _merge_row_numpy(row_ids, row_counts, n, act, skip_id, tier):
    """Merge sorted `act` ids into the sorted row, incrementing counts.

    Entries whose endpoint is dead (tier < 0) are dropped in the same
    pass; `skip_id` (the row owner) is excluded from `act`. Returns
    (ids, counts, length); the arrays may be longer than length.
    """
    ids = row_ids[:n]
    counts = row_counts[:n]
    if n:
        alive = tier[ids] >= 0
        if not alive.all():
            ids = ids[alive]
            counts = counts[alive]
    act = act[act != skip_id]
    merged = np.union1d(ids, act)
    out = np.zeros(merged.shape[0], dtype=np.int64)
    if ids.shape[0]:
        out[np.searchsorted(merged, ids)] = counts
    out[np.searchsorted(merged, act)] += 1
    return merged, out, merged.shape[0]


def _best_ltm_neighbor_numpy(row_ids, row_counts, n, tier, excluded):
    """Id of the strongest live LTM neighbor not in `excluded`, or -1.

    Strength is the raw co-firing count (the weight divisor is constant
    per row); ties resolve to the smallest id via the ascending row order.
    """
    ids = row_ids[:n]
    if not ids.shape[0]:
        return -1
    ok = (tier[ids] == 2) & ~excluded[ids]
    if not ok.any():
        return -1
    cand_ids = ids[ok]
    cand_counts = row_counts[:n][ok]
    return int(cand_ids[np.argmax(cand_counts)])


# -- numba implementations ---------------------------------------------------

if _have_numba:

    @njit(cache=True)
    def _corr_means_numba(cand, wm):
        n = cand.shape[0]
        m = wm.shape[0]
        d = cand.shape[1]
        out = np.zeros(n)
        for j in range(m):
            for i in range(n):
                s = 0.0
                for k in range(d):
                    diff = cand[i, k] - wm[j, k]
                    s += diff * diff
                out[i] += math.exp(-s)
        return out / m

    @njit(cache=True)
    def _merge_row_numba(row_ids, row_counts, n, act, skip_id, tier):
        m = act.shape[0]
        out_ids = np.empty(n + m, dtype=np.int64)
        out_counts = np.empty(n + m, dtype=np.int64)
        a = 0
        b = 0
        k = 0
        while a < n or b < m:
            if b < m and act[b] == skip_id:
                b += 1
                continue
            if a < n and tier[row_ids[a]] < 0:
                a += 1
                continue
            if b >= m or (a < n and row_ids[a] < act[b]):
                out_ids[k] = row_ids[a]
                out_counts[k] = row_counts[a]
                a += 1
            elif a >= n or act[b] < row_ids[a]:
                out_ids[k] = act[b]
                out_counts[k] = 1
                b += 1
            else:
                out_ids[k] = row_ids[a]
                out_counts[k] = row_counts[a] + 1
                a += 1
                b += 1
            k += 1
        return out_ids, out_counts, k

    @njit(cache=True)
    def _best_ltm_neighbor_numba(row_ids, row_counts, n, tier, excluded):
        best_count = 0
        best_id = -1
        for t in range(n):
            j = row_ids[t]
            if tier[j] == 2 and not excluded[j]:
                c = row_counts[t]
                if c > best_count:
                    best_count = c
                    best_id = j
        return best_id

    corr_means = _corr_means_numba
    merge_row = _merge_row_numba
    best_ltm_neighbor = _best_ltm_neighbor_numba
else:
    corr_means = _corr_means_numpy
    merge_row = _merge_row_numpy
    best_ltm_neighbor = _best_ltm_neighbor_numpy
