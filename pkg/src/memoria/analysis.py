"""Effect analyses over completed runs.

Every analysis is a pure function of a parsed trace and/or the final
engine state; nothing here touches a live engine. Outputs are plain
dataclasses that the CLI serializes to CSV and PNG.

Covered effects:

  creation_time_density       which creation times survive in long-term
                              memory (primacy / recency shape)
  contiguity_profile          mean edge weight by creation-time gap
                              (temporal contiguity)
  retrieval_autocorrelation   per-engram retrieval ACF by tier
                              (retrieval practice)
  retrieved_ltm_age_curve     mean age of retrieved long-term engrams
  ltm_bound_tracker           long-term memory size against its
                              steady-state bound
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .config import Config
from .errors import ConfigError
from .store import MemoryState
from .trace import TraceLog


# -- trace replay helpers ----------------------------------------------------

def creation_steps(log: TraceLog) -> dict[int, int]:
    """id -> creation step, from the created lists."""
    out: dict[int, int] = {}
    for record in log.records:
        for i in record.created:
            out[i] = record.step
    return out


def final_ltm_ids(log: TraceLog) -> set[int]:
    """Ids resident in long-term memory after the last record."""
    alive: set[int] = set()
    for record in log.records:
        if record.reset_before:
            alive.clear()
        alive.difference_update(record.pruned)
        alive.update(record.promoted_ltm)
    return alive


# -- creation-time density ---------------------------------------------------

@dataclass
class DensityReport:
    """Histogram + KDE of survivor creation times, as percent of the run."""

    positions_pct: np.ndarray     # survivor creation times, percent of run
    bin_edges: np.ndarray
    counts: np.ndarray
    kde_x: np.ndarray
    kde_y: np.ndarray

    def segment_means(self, head=0.15, tail=0.15,
                      mid=(0.3, 0.7)) -> tuple[float, float, float]:
        """Mean bin count over the head, middle and tail of the run."""
        centers = (self.bin_edges[:-1] + self.bin_edges[1:]) / 2
        head_mask = centers <= head * 100
        tail_mask = centers >= (1 - tail) * 100
        mid_mask = (centers >= mid[0] * 100) & (centers <= mid[1] * 100)

        def mean_of(mask):
            return float(self.counts[mask].mean()) if mask.any() else 0.0

        return mean_of(head_mask), mean_of(mid_mask), mean_of(tail_mask)


def creation_time_density(log: TraceLog, bins: int = 50,
                          bandwidth: float | None = None) -> DensityReport:
    """Creation-time distribution of engrams still in long-term memory at
    the end of the run. Empty long-term memory yields empty arrays."""
    if not log.records:
        raise ConfigError("empty trace")
    total = log.records[-1].step + 1
    created = creation_steps(log)
    survivors = sorted(final_ltm_ids(log))
    positions = np.asarray([created[i] for i in survivors], dtype=np.float64)
    pct = positions / max(total - 1, 1) * 100.0
    edges = np.linspace(0.0, 100.0, bins + 1)
    if not len(pct):
        return DensityReport(pct, edges, np.zeros(bins),
                             np.empty(0), np.empty(0))
    counts, _ = np.histogram(pct, bins=edges)
    kde_x = np.linspace(0.0, 100.0, 201)
    if len(pct) > 1 and np.std(pct) > 0:
        from scipy.stats import gaussian_kde
        kde = gaussian_kde(pct, bw_method=bandwidth)
        kde_y = kde(kde_x)
    else:
        kde_y = np.zeros_like(kde_x)
    return DensityReport(pct, edges, counts.astype(np.float64), kde_x, kde_y)


# -- temporal contiguity -----------------------------------------------------

@dataclass
class ContiguityProfile:
    """Mean directed edge weight per |creation-step difference| bin.

    Bins are width-1 age differences, with everything at or beyond
    max_age_diff collapsed into the final overflow bin.
    """

    age_diffs: np.ndarray      # 0 .. max_age_diff (last bin is overflow)
    mean_weight: np.ndarray    # nan where no pairs
    pair_count: np.ndarray

    def band_mean(self, lo: int, hi: int) -> float:
        """Mean weight over bins lo..hi inclusive, pair-count weighted."""
        sel = (self.age_diffs >= lo) & (self.age_diffs <= hi)
        n = self.pair_count[sel]
        if n.sum() == 0:
            return float("nan")
        w = np.nan_to_num(self.mean_weight[sel])
        return float((w * n).sum() / n.sum())


def contiguity_profile(state: MemoryState,
                       max_age_diff: int = 200) -> ContiguityProfile:
    """Average weight between live co-fired engrams, binned by the
    difference of their creation steps. Pairs that never co-fired are
    excluded."""
    sums = np.zeros(max_age_diff + 1)
    nums = np.zeros(max_age_diff + 1, dtype=np.int64)
    for i in state.live_ids():
        fires = state.engram(i).fire_count
        if fires == 0:
            continue
        cs_i = state.engram(i).creation_step
        for j, count in state.cofire_items(i):
            gap = min(abs(cs_i - state.engram(j).creation_step), max_age_diff)
            sums[gap] += count / fires
            nums[gap] += 1
    with np.errstate(invalid="ignore"):
        means = np.where(nums > 0, sums / np.maximum(nums, 1), np.nan)
    return ContiguityProfile(np.arange(max_age_diff + 1), means, nums)


# -- retrieval autocorrelation ------------------------------------------------

@dataclass
class AcfTable:
    """Aggregated retrieval autocorrelation per lag and tier.

    Short-term coefficients are plain means across engrams; long-term
    coefficients are weighted by each engram's long-term residency (its
    retrieval series length). nan marks lags with no contributing series.
    """

    lags: list[int]
    stm: list[float]
    stm_n: list[int]
    ltm: list[float]
    ltm_n: list[int]


def windowed_pearson(series, lag: int) -> float | None:
    """Pearson correlation of a 0/1 series against itself shifted by
    `lag`. Series too short for the lag yield None; zero-variance windows
    count as perfect autocorrelation (coefficient 1)."""
    n = len(series)
    if n <= lag:
        return None
    a = np.asarray(series[:n - lag], dtype=np.float64)
    b = np.asarray(series[lag:], dtype=np.float64)
    da = a - a.mean()
    db = b - b.mean()
    denom = math.sqrt(float((da * da).sum()) * float((db * db).sum()))
    if denom == 0.0:
        return 1.0
    return float((da * db).sum() / denom)


def _residency_series(log: TraceLog):
    """Per-engram 0/1 retrieval series while resident in each tier."""
    stm_series: dict[int, list[int]] = {}
    ltm_series: dict[int, list[int]] = {}
    cur_stm: set[int] = set()
    cur_ltm: set[int] = set()
    for record in log.records:
        if record.reset_before:
            cur_stm.clear()
            cur_ltm.clear()
        got_stm = set(record.stm_rem)
        got_ltm = set(record.ltm_rem)
        for i in cur_stm:
            stm_series.setdefault(i, []).append(1 if i in got_stm else 0)
        for i in cur_ltm:
            ltm_series.setdefault(i, []).append(1 if i in got_ltm else 0)
        cur_stm.difference_update(record.pruned)
        cur_ltm.difference_update(record.pruned)
        cur_stm.difference_update(record.promoted_ltm)
        cur_ltm.update(record.promoted_ltm)
        cur_stm.update(record.promoted_stm)
    return stm_series, ltm_series


def retrieval_autocorrelation(log: TraceLog, max_lag: int,
                              config: Config | None = None) -> AcfTable:
    """Retrieval-practice profile: per-engram ACF of the 0/1 retrieval
    series, aggregated per lag.

    The short-term lag range is capped at residency - 1 (residency =
    ceil(stm_capacity / n_wm)); a larger max_lag is capped with a
    warning. Long-term lags run to max_lag.
    """
    config = config or log.config
    if config is None:
        raise ConfigError("trace carries no config; pass one explicitly")
    residency = math.ceil(config.stm_capacity / config.n_wm)
    stm_max = min(max_lag, residency - 1)
    if max_lag > stm_max:
        warnings.warn(
            f"short-term residency is {residency} steps; capping its ACF "
            f"lags at {stm_max}", stacklevel=2)
    stm_series, ltm_series = _residency_series(log)
    lags = list(range(1, max_lag + 1))
    table = AcfTable(lags=lags, stm=[], stm_n=[], ltm=[], ltm_n=[])
    for lag in lags:
        if lag <= stm_max:
            vals = [r for s in stm_series.values()
                    if (r := windowed_pearson(s, lag)) is not None]
            table.stm.append(float(np.mean(vals)) if vals else float("nan"))
            table.stm_n.append(len(vals))
        else:
            table.stm.append(float("nan"))
            table.stm_n.append(0)
        pairs = [(len(s), r) for s in ltm_series.values()
                 if (r := windowed_pearson(s, lag)) is not None]
        if pairs:
            weights = np.asarray([n for n, _ in pairs], dtype=np.float64)
            vals = np.asarray([r for _, r in pairs])
            table.ltm.append(float((weights * vals).sum() / weights.sum()))
        else:
            table.ltm.append(float("nan"))
        table.ltm_n.append(len(pairs))
    return table


# -- retrieved long-term age --------------------------------------------------

@dataclass
class AgeCurve:
    steps: list[int]
    mean_age: list[float]      # nan where nothing was retrieved
    n_retrieved: list[int]

    def fitted_slope(self) -> float:
        """Least-squares slope over the defined points; nan if under two."""
        xs = np.asarray([s for s, a in zip(self.steps, self.mean_age)
                         if not math.isnan(a)], dtype=np.float64)
        ys = np.asarray([a for a in self.mean_age if not math.isnan(a)])
        if len(xs) < 2:
            return float("nan")
        return float(np.polyfit(xs, ys, 1)[0])


def retrieved_ltm_age_curve(log: TraceLog) -> AgeCurve:
    """Per step, the mean age (steps since creation) of the engrams
    retrieved from long-term memory; gaps where none were."""
    created = creation_steps(log)
    curve = AgeCurve(steps=[], mean_age=[], n_retrieved=[])
    for record in log.records:
        curve.steps.append(record.step)
        curve.n_retrieved.append(len(record.ltm_rem))
        if record.ltm_rem:
            ages = [record.step - created[i] for i in record.ltm_rem]
            curve.mean_age.append(float(np.mean(ages)))
        else:
            curve.mean_age.append(float("nan"))
    return curve


# -- long-term size bound -----------------------------------------------------

@dataclass
class BoundReport:
    """Actual long-term size and total lifespan against the steady-state
    asymptote alpha * (n_stm_rem + n_ltm_rem), plus a one-step-ahead
    total-lifespan prediction from the decay recurrence
    l' = (1 - c) * l + K with empirically measured c."""

    steps: list[int]
    ltm_size: list[int]
    total_lifespan: list[float]
    predicted_lifespan: list[float]   # nan for the first step
    asymptote: float
    slack: float
    exceeded_steps: list[int] = field(default_factory=list)

    def max_ltm(self, after_step: int = 0) -> int:
        vals = [n for s, n in zip(self.steps, self.ltm_size)
                if s >= after_step]
        return max(vals) if vals else 0

    def mean_relative_error(self, after_step: int = 0) -> float:
        errs = []
        for s, actual, pred in zip(self.steps, self.total_lifespan,
                                   self.predicted_lifespan):
            if s >= after_step and not math.isnan(pred) and actual > 0:
                errs.append(abs(pred - actual) / actual)
        return float(np.mean(errs)) if errs else float("nan")


def ltm_bound_tracker(log: TraceLog, config: Config | None = None,
                      slack: float = 0.1) -> BoundReport:
    config = config or log.config
    if config is None:
        raise ConfigError("trace carries no config; pass one explicitly")
    asymptote = config.alpha * (config.n_stm_rem + config.n_ltm_rem)
    report = BoundReport(steps=[], ltm_size=[], total_lifespan=[],
                         predicted_lifespan=[], asymptote=asymptote,
                         slack=slack)
    prev_l = None
    prev_c = None
    for record in log.records:
        report.steps.append(record.step)
        report.ltm_size.append(record.ltm_size)
        report.total_lifespan.append(record.total_lifespan)
        if prev_l is None or record.reset_before:
            report.predicted_lifespan.append(float("nan"))
        else:
            report.predicted_lifespan.append(
                (1.0 - prev_c) * prev_l + asymptote)
        prev_l = record.total_lifespan
        prev_c = (record.ltm_size / record.total_lifespan
                  if record.total_lifespan > 0 else 0.0)
        if record.ltm_size > asymptote * (1.0 + slack):
            report.exceeded_steps.append(record.step)
    return report
