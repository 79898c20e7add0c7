"""Synthetic vector streams and surrogate contribution models.

Workloads are deterministic in their seed (PCG64 generator). Each one
yields an array of shape (steps, vectors_per_step, dim):

  iid-gaussian      independent standard-normal vectors
  clustered-topics  one topic center per step, drawn from a fixed set of
                    cluster centers, plus within-cluster noise
  drifting          a slowly random-walking center plus noise
  motif-replay      a fixed motif block re-presented over the stream; with
                    motif_period 0 the whole first half replays as the
                    second half, otherwise a motif_len-step block recurs at
                    every multiple of motif_period

Contribution models turn a retrieval result into per-engram weights for
the memorize phase:

  uniform              every retrieved engram contributed equally
  correlation-softmax  weights follow a softmax of the correlation scores
  oracle-task          engrams created during designated useful steps get
                       weight 1.0, everything else a small floor
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .retrieval import RetrievalResult
from .store import MemoryState

WORKLOAD_KINDS = ("iid-gaussian", "clustered-topics", "drifting", "motif-replay")
CONTRIBUTION_KINDS = ("uniform", "correlation-softmax", "oracle-task")


@dataclass(frozen=True)
class WorkloadSpec:
    kind: str
    dim: int
    steps: int
    vectors_per_step: int
    seed: int
    clusters: int = 8
    cluster_std: float = 0.25
    drift_rate: float = 0.02
    motif_len: int = 0
    motif_period: int = 0
    motif_start: int = 0

    def __post_init__(self):
        if self.kind not in WORKLOAD_KINDS:
            raise ConfigError(f"unknown workload kind {self.kind!r}")
        if self.dim <= 0 or self.steps <= 0 or self.vectors_per_step <= 0:
            raise ConfigError("dim, steps and vectors_per_step must be positive")
        if self.kind == "clustered-topics" and self.clusters <= 0:
            raise ConfigError("clusters must be positive")
        if self.motif_period < 0 or self.motif_len < 0 or self.motif_start < 0:
            raise ConfigError("motif parameters must be non-negative")
        if self.motif_period and self.motif_len > self.motif_period:
            raise ConfigError("motif_len cannot exceed motif_period")

    def motif_steps(self) -> set[int]:
        """Step indices covered by a motif presentation (empty for
        non-motif workloads)."""
        if self.kind != "motif-replay":
            return set()
        if self.motif_period == 0:
            half = self.steps // 2
            return set(range(half)) | set(range(half, 2 * half))
        length = self.motif_len or 1
        out: set[int] = set()
        for start in range(self.motif_start, self.steps, self.motif_period):
            out.update(range(start, min(start + length, self.steps)))
        return out


def generate_workload(spec: WorkloadSpec) -> np.ndarray:
    """Materialize the stream as an array of shape
    (steps, vectors_per_step, dim)."""
    rng = np.random.default_rng(spec.seed)
    shape = (spec.steps, spec.vectors_per_step, spec.dim)
    if spec.kind == "iid-gaussian":
        return rng.standard_normal(shape)
    if spec.kind == "clustered-topics":
        centers = rng.standard_normal((spec.clusters, spec.dim))
        topics = rng.integers(0, spec.clusters, size=spec.steps)
        noise = rng.standard_normal(shape)
        return centers[topics][:, None, :] + spec.cluster_std * noise
    if spec.kind == "drifting":
        steps_drift = rng.standard_normal((spec.steps, spec.dim))
        center = rng.standard_normal(spec.dim)
        noise = rng.standard_normal(shape)
        out = np.empty(shape)
        for t in range(spec.steps):
            center = center + spec.drift_rate * steps_drift[t]
            out[t] = center + spec.cluster_std * noise[t]
        return out
    # motif-replay
    base = rng.standard_normal(shape)
    if spec.motif_period == 0:
        half = spec.steps // 2
        base[half:2 * half] = base[:half]
        return base
    length = spec.motif_len or 1
    motif = rng.standard_normal((length, spec.vectors_per_step, spec.dim))
    for start in range(spec.motif_start, spec.steps, spec.motif_period):
        stop = min(start + length, spec.steps)
        base[start:stop] = motif[:stop - start]
    return base


@dataclass(frozen=True)
class ContributionModel:
    kind: str
    temperature: float = 1.0
    useful_steps: frozenset[int] = frozenset()
    floor: float = 0.01

    def __post_init__(self):
        if self.kind not in CONTRIBUTION_KINDS:
            raise ConfigError(f"unknown contribution kind {self.kind!r}")
        if self.temperature <= 0:
            raise ConfigError("temperature must be positive")
        if not 0 <= self.floor:
            raise ConfigError("floor must be non-negative")

    def source(self, state: MemoryState):
        """Bind the model to an engine, returning the step callback."""
        if self.kind == "uniform":
            return lambda result: {i: 1.0 for i in result.rem}
        if self.kind == "correlation-softmax":
            temp = self.temperature

            def softmax_weights(result: RetrievalResult):
                rem = result.rem
                if not rem:
                    return {}
                top = max(result.scores[i] for i in rem)
                return {i: math.exp((result.scores[i] - top) / temp)
                        for i in rem}

            return softmax_weights
        if not self.useful_steps:
            raise ConfigError("oracle-task model needs useful_steps")
        useful = self.useful_steps
        floor = self.floor

        def task_weights(result: RetrievalResult):
            return {
                i: 1.0 if state.engram(i).creation_step in useful else floor
                for i in result.rem
            }

        return task_weights
