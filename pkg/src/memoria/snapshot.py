"""Versioned text snapshot of an engine state, for checkpointing.

Layout (one record per line, space separated):

    memoria-snapshot 1
    config dim=<int> n_wm=<int> stm_capacity=<int> n_stm_rem=<int> \
           n_ltm_rem=<int> n_depth=<int> initial_lifespan=<float> alpha=<float>
    state step=<int> next_id=<int>
    engram <id> <tier> <creation_step> <fire_count> <lifespan> <v0> <v1> ...
    count <i> <j> <n>

Engram lines appear in canonical order: working memory in batch order,
short-term memory in FIFO order, long-term memory ascending by id; the
tier field is wm/stm/ltm. Count lines hold the live off-diagonal pairs
with i < j, ascending; counts are symmetric, and the diagonal is the
engram's fire count. Floats are written with shortest round-trip repr, so
saving a loaded snapshot reproduces the file byte for byte.
"""

from __future__ import annotations

import io

import numpy as np

from .config import Config
from .errors import SnapshotError
from .store import MemoryState, Tier, tier_from_name, tier_name

FORMAT_VERSION = 1


def write_snapshot(state: MemoryState, stream) -> None:
    w = stream.write
    w(f"memoria-snapshot {FORMAT_VERSION}\n")
    cfg = state.config
    w("config " + " ".join(
        f"{k}={v!r}" if isinstance(v, float) else f"{k}={v}"
        for k, v in cfg.to_dict().items()) + "\n")
    w(f"state step={state.step} next_id={state.next_id()}\n")
    for engram_id in state.live_ids():
        e = state.engram(engram_id)
        vec = " ".join(repr(float(x)) for x in e.vector)
        w(f"engram {e.id} {tier_name(e.tier)} {e.creation_step} "
          f"{e.fire_count} {e.lifespan!r} {vec}\n")
    for i in sorted(state.live_ids()):
        for j, count in state.cofire_items(i):
            if i < j:
                w(f"count {i} {j} {count}\n")


def save_snapshot(state: MemoryState, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_snapshot(state, fh)


def snapshot_string(state: MemoryState) -> str:
    buf = io.StringIO()
    write_snapshot(state, buf)
    return buf.getvalue()


def _parse_kv(parts, lineno):
    out = {}
    for part in parts:
        if "=" not in part:
            raise SnapshotError(f"line {lineno}: expected key=value, got {part!r}")
        key, value = part.split("=", 1)
        out[key] = value
    return out


def read_snapshot(stream) -> MemoryState:
    lines = stream.read().splitlines()
    if not lines or not lines[0].startswith("memoria-snapshot "):
        raise SnapshotError("not a memoria snapshot")
    version = lines[0].split()[-1]
    if version != str(FORMAT_VERSION):
        raise SnapshotError(f"unsupported snapshot version {version}")

    state: MemoryState | None = None
    meta: dict = {}
    engrams: list[tuple] = []
    counts: list[tuple[int, int, int]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        kind, *parts = line.split()
        if kind == "config":
            kv = _parse_kv(parts, lineno)
            state = MemoryState(Config.from_dict(kv))
        elif kind == "state":
            meta = _parse_kv(parts, lineno)
        elif kind == "engram":
            if len(parts) < 5:
                raise SnapshotError(f"line {lineno}: truncated engram record")
            engrams.append((int(parts[0]), parts[1], int(parts[2]),
                            int(parts[3]), float(parts[4]),
                            [float(x) for x in parts[5:]]))
        elif kind == "count":
            counts.append((int(parts[0]), int(parts[1]), int(parts[2])))
        else:
            raise SnapshotError(f"line {lineno}: unknown record {kind!r}")
    if state is None:
        raise SnapshotError("missing config record")
    state.step = int(meta.get("step", 0))
    state._next_id = int(meta.get("next_id", 0))
    state._ensure_capacity(state._next_id)

    for engram_id, tname, creation, fires, lifespan, vec in engrams:
        if engram_id >= state._next_id:
            raise SnapshotError(f"engram id {engram_id} beyond next_id")
        if len(vec) != state.config.dim:
            raise SnapshotError(
                f"engram {engram_id} has {len(vec)} components, "
                f"expected {state.config.dim}")
        try:
            tier = tier_from_name(tname)
        except KeyError:
            raise SnapshotError(f"unknown tier {tname!r}") from None
        state._vectors[engram_id] = vec
        state._lifespan[engram_id] = lifespan
        state._creation[engram_id] = creation
        state._fires[engram_id] = fires
        state._tier[engram_id] = int(tier)
        if tier == Tier.WORKING:
            state._wm.append(engram_id)
        elif tier == Tier.SHORT_TERM:
            state._stm.append(engram_id)
        else:
            state._ltm.add(engram_id)

    neighbors: dict[int, list[tuple[int, int]]] = {}
    for i, j, count in counts:
        if not (state.is_live(i) and state.is_live(j)):
            raise SnapshotError(f"count pair ({i}, {j}) has a dead endpoint")
        neighbors.setdefault(i, []).append((j, count))
        neighbors.setdefault(j, []).append((i, count))
    for engram_id, items in neighbors.items():
        items.sort()
        ids = np.asarray([j for j, _ in items], dtype=np.int64)
        cnt = np.asarray([c for _, c in items], dtype=np.int64)
        state._rows[engram_id] = [ids, cnt, len(items)]
    return state


def load_snapshot(path) -> MemoryState:
    with open(path, "r", encoding="utf-8") as fh:
        return read_snapshot(fh)
