"""memoria: a three-tier engram memory engine.

Engrams (vector payloads with lifespans) flow working memory -> short-term
FIFO -> unbounded long-term memory. A Hebbian co-firing graph links
engrams that were activated together; retrieval cues on the current
working-memory batch, walks the graph into long-term memory, and
reinforcement extends the lifespans of whatever proved useful while
everything else decays away.
"""

from .config import Config
from .errors import (ConfigError, ContractError, MemoriaError, PhaseError,
                     SequencingError, ShapeError, SnapshotError, TraceError,
                     UnknownEngramError)
from .lifecycle import (ContributionWeights, StepReport, advance_tiers,
                        apply_contributions, decay_and_prune, record_cofiring,
                        step, uniform_contributions)
from .retrieval import (RetrievalResult, correlation, explore_ltm, retrieve,
                        seed_ltm, select_top_k, tier_correlations)
from .snapshot import (load_snapshot, read_snapshot, save_snapshot,
                       snapshot_string, write_snapshot)
from .store import Engram, MemoryState, Tier, new_engine
from .trace import TraceLog, TraceRecord, TraceWriter, parse_trace, read_trace
from .workloads import ContributionModel, WorkloadSpec, generate_workload

__version__ = "0.1.0"

__all__ = [
    "Config", "Engram", "MemoryState", "Tier", "new_engine",
    "RetrievalResult", "correlation", "tier_correlations", "select_top_k",
    "seed_ltm", "explore_ltm", "retrieve",
    "ContributionWeights", "StepReport", "record_cofiring",
    "apply_contributions", "decay_and_prune", "advance_tiers", "step",
    "uniform_contributions",
    "TraceLog", "TraceRecord", "TraceWriter", "parse_trace", "read_trace",
    "write_snapshot", "save_snapshot", "snapshot_string", "read_snapshot",
    "load_snapshot",
    "WorkloadSpec", "generate_workload", "ContributionModel",
    "MemoriaError", "ConfigError", "SequencingError", "ShapeError",
    "UnknownEngramError", "ContractError", "TraceError", "SnapshotError",
    "PhaseError",
    "__version__",
]
