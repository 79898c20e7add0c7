"""Self-verification campaigns: differential fuzzing against the oracle,
the Hebbian plasticity properties, and trace-replay count reconstruction.

These run both from the CLI (`memoria verify`) and from the acceptance
test suite. Every campaign is deterministic in its seed.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import retrieval
from .config import Config
from .lifecycle import record_cofiring, step
from .oracle import (compare_counts, full_ltm_search, random_wire_step,
                     recount_from_trace, reference_retrieve)
from .snapshot import save_snapshot
from .store import MemoryState, new_engine
from .trace import TraceWriter, parse_trace
from .workloads import WorkloadSpec, generate_workload

# Scaled-down engine used by long self-test simulations: same geometry as
# the reference settings (capacity / per-step = 8 steps of short-term
# residency) at a fraction of the size.
SMALL_CONFIG = Config(dim=8, n_wm=5, stm_capacity=40, n_stm_rem=5,
                      n_ltm_rem=5, n_depth=10, initial_lifespan=9.0,
                      alpha=2.0)


def build_random_state(rng: np.random.Generator) -> MemoryState:
    """A small random engine state grown organically through real steps.

    Some vectors are exact duplicates of earlier ones so that score ties
    (and their id-order resolution) actually occur.
    """
    dim = int(rng.integers(2, 5))
    n_wm = int(rng.integers(1, 4))
    stm_capacity = int(rng.integers(2, 7))
    config = Config(
        dim=dim,
        n_wm=n_wm,
        stm_capacity=stm_capacity,
        n_stm_rem=int(rng.integers(1, stm_capacity + 1)),
        n_ltm_rem=int(rng.integers(1, 5)),
        n_depth=int(rng.integers(0, 5)),
        initial_lifespan=float(rng.integers(4, 13)),
        alpha=float(rng.choice([1.0, 2.0, 8.0])),
    )
    state = new_engine(config)
    pool: list[np.ndarray] = []

    def batch() -> list[np.ndarray]:
        k = int(rng.integers(1, n_wm + 1))
        vectors = []
        for _ in range(k):
            if pool and rng.random() < 0.3:
                vectors.append(pool[int(rng.integers(0, len(pool)))])
            else:
                v = rng.standard_normal(dim)
                pool.append(v)
                vectors.append(v)
        return vectors

    def weights(result):
        mode = rng.random()
        if mode < 0.2:
            return {i: 0.0 for i in result.rem}
        if mode < 0.5:
            return {i: 1.0 for i in result.rem}
        return {i: float(rng.random()) for i in result.rem}

    for _ in range(int(rng.integers(1, 12))):
        step(state, batch(), weights)
    state.add_working_memory(batch())
    return state


@dataclass
class CampaignReport:
    name: str
    iterations: int
    failures: list[str] = field(default_factory=list)
    artifacts: list[Path] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def differential_campaign(seed: int, iterations: int, fail_dir=None,
                          engine_retrieve=None) -> CampaignReport:
    """Engine retrieval vs the brute-force reference on random states.

    Set and order of every result list must agree exactly. On the first
    divergence the offending state is serialized for inspection.
    """
    engine_retrieve = engine_retrieve or retrieval.retrieve
    report = CampaignReport("differential-retrieval", iterations)
    for it in range(iterations):
        rng = np.random.default_rng([seed, it])
        state = build_random_state(rng)
        got = engine_retrieve(state)
        want = reference_retrieve(state)
        mismatches = []
        for name in ("wm", "stm_rem", "ltm_rem", "ltm_found"):
            if getattr(got, name) != getattr(want, name):
                mismatches.append(
                    f"{name}: engine={getattr(got, name)} "
                    f"oracle={getattr(want, name)}")
        if mismatches:
            detail = f"case {it}: " + "; ".join(mismatches)
            report.failures.append(detail)
            if fail_dir is not None and not report.artifacts:
                fail_dir = Path(fail_dir)
                fail_dir.mkdir(parents=True, exist_ok=True)
                artifact = fail_dir / f"divergent-{it}.snapshot"
                save_snapshot(state, artifact)
                report.artifacts.append(artifact)
    return report


def _live_pairs(state: MemoryState, rng: np.random.Generator, k: int = 4):
    ids = state.live_ids()
    if len(ids) < 2:
        return []
    pairs = []
    for _ in range(k):
        i, j = rng.choice(len(ids), size=2, replace=False)
        pairs.append((ids[i], ids[j]))
    return pairs


def hebbian_campaign(seed: int, iterations: int) -> CampaignReport:
    """The six plasticity properties, each probed on random small states.

    locality         weight(i,j) depends only on counts of i and j
    cooperativity    weight(i,j) rises only when both fire; it does rise
                     when both fire and it was below 1
    depression       firing i without j drops weight(i,j) to exactly
                     count(i,j) / (count(i,i) + 1)
    boundedness      every weight lies in [0, 1]
    competition      firing i with j only lowers weight(i,k) for others
    stability        counts never decrease while both endpoints live
    """
    report = CampaignReport("hebbian-properties", iterations)
    for it in range(iterations):
        rng = np.random.default_rng([seed + 1, it])
        state = build_random_state(rng)
        problems = _check_hebbian_once(state, rng)
        if problems:
            report.failures.append(f"case {it}: " + "; ".join(problems))
    return report


def _check_hebbian_once(state: MemoryState,
                        rng: np.random.Generator) -> list[str]:
    problems = []
    ids = state.live_ids()

    # boundedness over sampled pairs
    for i, j in _live_pairs(state, rng):
        w = state.edge_weight(i, j)
        if not 0.0 <= w <= 1.0:
            problems.append(f"weight({i},{j})={w} out of [0,1]")

    if len(ids) >= 4:
        i, j, k, l = (ids[p] for p in rng.choice(len(ids), 4, replace=False))

        # locality: firing (k, l) leaves weight(i, j) untouched
        before = state.edge_weight(i, j)
        record_cofiring(state, [k, l])
        if state.edge_weight(i, j) != before:
            problems.append("locality violated by third-party firing")

        # depression + competition: fire i with k; every other neighbor
        # weight of i must drop to count/(fires+1)
        neighbors = [(j2, c) for j2, c in state.cofire_items(i) if j2 != k]
        fires_before = state.engram(i).fire_count
        record_cofiring(state, [i, k])
        for j2, c in neighbors:
            want = c / (fires_before + 1)
            got = state.edge_weight(i, j2)
            if got != want:
                problems.append(
                    f"depression: weight({i},{j2})={got}, want {want}")
            if fires_before and not got < c / fires_before:
                problems.append("competition: weight failed to decrease")

        # cooperativity: both firing raises the weight unless saturated
        before = state.edge_weight(i, j)
        count_before = state.count(i, j)
        record_cofiring(state, [i, j])
        after = state.edge_weight(i, j)
        if before < 1.0 and not after > before:
            problems.append("cooperativity: joint firing did not increase")
        if state.count(i, j) != count_before + 1:
            problems.append("cooperativity: pair count did not increment")

        # stability: a random extra firing never lowers existing counts
        snapshot_counts = {(i, j2): c for j2, c in state.cofire_items(i)}
        act = [ids[p] for p in rng.choice(len(ids), 2, replace=False)]
        record_cofiring(state, act)
        for (a, b), c in snapshot_counts.items():
            if state.is_live(a) and state.is_live(b) and state.count(a, b) < c:
                problems.append("stability: count decreased")
    return problems


def recount_check(seed: int = 0, steps: int = 500) -> CampaignReport:
    """Replay a full small-config simulation trace and require exact count
    agreement with the live engine."""
    report = CampaignReport("count-reconstruction", steps)
    spec = WorkloadSpec(kind="clustered-topics", dim=SMALL_CONFIG.dim,
                        steps=steps, vectors_per_step=SMALL_CONFIG.n_wm,
                        seed=seed, clusters=6, cluster_std=0.3)
    state = new_engine(SMALL_CONFIG)
    buf = io.StringIO()
    writer = TraceWriter(buf, config=SMALL_CONFIG)
    stream = generate_workload(spec)
    for t in range(steps):
        step(state, stream[t], lambda r: {i: 1.0 for i in r.rem},
             trace=writer)
    log = parse_trace(buf.getvalue().splitlines())
    counts = recount_from_trace(log)
    report.failures.extend(compare_counts(state, counts))
    return report


def hit_rate_run(config: Config, workload: WorkloadSpec, wiring: str,
                 seed: int = 0) -> float:
    """Mean recall of graph-guided long-term retrieval against exhaustive
    search over one simulated run. `wiring` is hebbian or random."""
    state = new_engine(config)
    stream = generate_workload(workload)
    rng = np.random.default_rng([seed, 77])
    recalls: list[float] = []

    def source(result):
        if state.ltm_size():
            k = min(config.n_ltm_rem, state.ltm_size())
            best = set(full_ltm_search(state, k))
            recalls.append(len(best & set(result.ltm_rem)) / k)
        return {i: 1.0 for i in result.rem}

    for t in range(workload.steps):
        if wiring == "hebbian":
            step(state, stream[t], source)
        else:
            random_wire_step(state, stream[t], source, rng)
    return float(np.mean(recalls)) if recalls else 0.0
