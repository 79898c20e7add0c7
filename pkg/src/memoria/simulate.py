"""Run manifests and the simulation driver.

A manifest fully determines a run byte for byte: engine config, workload,
contribution model, reset cadence, output directory and seed. Two
encodings of the same flat schema are accepted: `key = value` lines (with
# comments) or a single JSON object.

Keys: dim, n_wm, stm_capacity, n_stm_rem, n_ltm_rem, n_depth,
initial_lifespan, alpha, workload, steps, vectors_per_step, clusters,
cluster_std, drift_rate, motif_len, motif_period, contribution,
temperature, floor, reset_period, seed, out.

With `contribution = oracle-task`, the useful steps are the workload's
motif presentation steps, so the model rewards exactly the recurring
content.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .config import Config
from .errors import ConfigError
from .lifecycle import step
from .snapshot import save_snapshot
from .store import MemoryState, new_engine
from .trace import TraceWriter
from .workloads import ContributionModel, WorkloadSpec, generate_workload

_CONFIG_KEYS = ("dim", "n_wm", "stm_capacity", "n_stm_rem", "n_ltm_rem",
                "n_depth", "initial_lifespan", "alpha")
_INT_KEYS = {"dim", "n_wm", "stm_capacity", "n_stm_rem", "n_ltm_rem",
             "n_depth", "steps", "vectors_per_step", "clusters", "motif_len",
             "motif_period", "motif_start", "reset_period", "seed"}
_FLOAT_KEYS = {"initial_lifespan", "alpha", "cluster_std", "drift_rate",
               "temperature", "floor"}


@dataclass(frozen=True)
class RunManifest:
    config: Config
    workload: WorkloadSpec
    contribution: ContributionModel
    reset_period: int = 0
    out: str = "memoria-run"
    seed: int = 0

    def __post_init__(self):
        if self.reset_period < 0:
            raise ConfigError("reset_period must be non-negative")
        if self.workload.dim != self.config.dim:
            raise ConfigError(
                f"workload dim {self.workload.dim} != config dim "
                f"{self.config.dim}")
        if self.workload.vectors_per_step > self.config.n_wm:
            raise ConfigError(
                f"vectors_per_step {self.workload.vectors_per_step} exceeds "
                f"n_wm {self.config.n_wm}")


def manifest_from_dict(raw: dict, overrides: dict | None = None) -> RunManifest:
    data = dict(raw)
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    parsed: dict = {}
    for key, value in data.items():
        if key in _INT_KEYS:
            parsed[key] = int(value)
        elif key in _FLOAT_KEYS:
            parsed[key] = float(value)
        else:
            parsed[key] = value
    seed = parsed.get("seed", 0)
    config = Config.from_dict({k: parsed[k] for k in _CONFIG_KEYS
                               if k in parsed})
    workload_kwargs = {k: parsed[k] for k in
                       ("clusters", "cluster_std", "drift_rate", "motif_len",
                        "motif_period", "motif_start") if k in parsed}
    if "workload" not in parsed:
        raise ConfigError("manifest requires 'workload'")
    if "steps" not in parsed:
        raise ConfigError("manifest requires 'steps'")
    workload = WorkloadSpec(
        kind=parsed["workload"],
        dim=config.dim,
        steps=parsed["steps"],
        vectors_per_step=parsed.get("vectors_per_step", config.n_wm),
        seed=seed,
        **workload_kwargs)
    kind = parsed.get("contribution", "uniform")
    contribution_kwargs = {}
    if "temperature" in parsed:
        contribution_kwargs["temperature"] = parsed["temperature"]
    if "floor" in parsed:
        contribution_kwargs["floor"] = parsed["floor"]
    if kind == "oracle-task":
        contribution_kwargs["useful_steps"] = frozenset(workload.motif_steps())
    contribution = ContributionModel(kind=kind, **contribution_kwargs)
    known = (set(_INT_KEYS) | set(_FLOAT_KEYS)
             | {"workload", "contribution", "out"})
    unknown = set(parsed) - known
    if unknown:
        raise ConfigError(f"unknown manifest keys: {sorted(unknown)}")
    return RunManifest(
        config=config,
        workload=workload,
        contribution=contribution,
        reset_period=parsed.get("reset_period", 0),
        out=str(parsed.get("out", "memoria-run")),
        seed=seed,
    )


def parse_manifest(path, overrides: dict | None = None) -> RunManifest:
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("{"):
        raw = json.loads(text)
        if not isinstance(raw, dict):
            raise ConfigError("JSON manifest must be an object")
    else:
        raw = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(
                    f"manifest line {lineno}: expected key = value")
            key, value = line.split("=", 1)
            raw[key.strip()] = value.strip()
    return manifest_from_dict(raw, overrides)


def run_simulation(manifest: RunManifest, out_dir=None) -> tuple[Path, Path]:
    """Execute a manifest: returns (trace path, snapshot path).

    Resets, when configured, clear all memory just before every
    reset_period-th step and leave a marker in the trace.
    """
    out = Path(out_dir if out_dir is not None else manifest.out)
    out.mkdir(parents=True, exist_ok=True)
    trace_path = out / "trace.jsonl"
    snapshot_path = out / "snapshot.txt"
    state = new_engine(manifest.config)
    stream = generate_workload(manifest.workload)
    source = manifest.contribution.source(state)
    with open(trace_path, "w", encoding="utf-8") as fh:
        writer = TraceWriter(fh, config=manifest.config)
        run_steps(state, stream, source, writer,
                  reset_period=manifest.reset_period)
    save_snapshot(state, snapshot_path)
    return trace_path, snapshot_path


def run_steps(state: MemoryState, stream, source, writer=None,
              reset_period: int = 0) -> None:
    """Drive the engine over a (steps, n, dim) stream."""
    for t in range(stream.shape[0]):
        if reset_period and state.step > 0 and state.step % reset_period == 0:
            state.reset()
            if writer is not None:
                writer.write_reset(state.step)
        step(state, stream[t], source, trace=writer)
