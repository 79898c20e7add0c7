"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the same seeded simulation and kernel micro-benchmarks under both
backends (each in a child process, since the backend is fixed at import
time) and prints a comparison table:

    python3 benchmarks/bench_backends.py
    python3 benchmarks/bench_backends.py --steps 500 --dim 32
"""

import argparse
import json
import os
import statistics
import subprocess
import sys
import time


def run_child(backend: str, args) -> dict:
    env = dict(os.environ, MEMORIA_BACKEND=backend)
    out = subprocess.run(
        [sys.executable, __file__, "--child",
         "--steps", str(args.steps), "--dim", str(args.dim)],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.splitlines()[-1])


def measure(args) -> dict:
    import numpy as np

    from memoria import Config, new_engine, step
    from memoria import _kernels
    from memoria.workloads import WorkloadSpec, generate_workload

    config = Config(dim=args.dim)
    spec = WorkloadSpec(kind="clustered-topics", dim=args.dim,
                        steps=args.steps, vectors_per_step=config.n_wm,
                        seed=7, clusters=12, cluster_std=0.3)
    stream = generate_workload(spec)
    state = new_engine(config)
    source = lambda r: {i: 1.0 for i in r.rem}
    step(state, stream[0], source)  # warm up any JIT compilation

    t0 = time.perf_counter()
    for t in range(1, args.steps):
        step(state, stream[t], source)
    sim_elapsed = time.perf_counter() - t0

    rng = np.random.default_rng(0)
    cand = rng.standard_normal((400, args.dim))
    wm = rng.standard_normal((50, args.dim))
    _kernels.corr_means(cand, wm)
    reps = [0.0] * 50
    for i in range(len(reps)):
        t0 = time.perf_counter()
        _kernels.corr_means(cand, wm)
        reps[i] = time.perf_counter() - t0
    corr_ms = statistics.median(reps) * 1e3

    row_ids = np.arange(0, 3000, 2, dtype=np.int64)
    row_counts = rng.integers(1, 50, size=row_ids.size).astype(np.int64)
    act = np.sort(rng.choice(4000, size=150, replace=False)).astype(np.int64)
    tier = np.full(5000, 2, dtype=np.int8)
    _kernels.merge_row(row_ids, row_counts, row_ids.size, act, -1, tier)
    reps = [0.0] * 200
    for i in range(len(reps)):
        t0 = time.perf_counter()
        _kernels.merge_row(row_ids, row_counts, row_ids.size, act, -1, tier)
        reps[i] = time.perf_counter() - t0
    merge_us = statistics.median(reps) * 1e6

    excluded = np.zeros(5000, dtype=np.bool_)
    _kernels.best_ltm_neighbor(row_ids, row_counts, row_ids.size, tier,
                               excluded)
    reps = [0.0] * 200
    for i in range(len(reps)):
        t0 = time.perf_counter()
        _kernels.best_ltm_neighbor(row_ids, row_counts, row_ids.size, tier,
                                   excluded)
        reps[i] = time.perf_counter() - t0
    argmax_us = statistics.median(reps) * 1e6

    return {
        "backend": _kernels.BACKEND,
        "steps_per_s": (args.steps - 1) / sim_elapsed,
        "ms_per_step": sim_elapsed / (args.steps - 1) * 1e3,
        "corr_ms": corr_ms,
        "merge_us": merge_us,
        "argmax_us": argmax_us,
        "ltm_size": state.ltm_size(),
    }


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=300)
    parser.add_argument("--dim", type=int, default=16)
    parser.add_argument("--child", action="store_true",
                        help="internal: measure current backend only")
    args = parser.parse_args()

    if args.child:
        print(json.dumps(measure(args)))
        return 0

    results = [run_child(backend, args) for backend in ("numba", "numpy")]
    fields = [("simulation", "ms_per_step", "ms/step"),
              ("correlation scan", "corr_ms", "ms"),
              ("co-fire row merge", "merge_us", "us"),
              ("neighbor argmax", "argmax_us", "us")]
    print(f"reference config simulation, {args.steps} steps, dim {args.dim} "
          f"(final long-term size {results[0]['ltm_size']})")
    print(f"{'kernel':<22}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for label, key, unit in fields:
        a, b = results[0][key], results[1][key]
        print(f"{label:<22}{a:>10.3f} {unit:<3}{b:>8.3f} {unit:<3}"
              f"{b / a:>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
