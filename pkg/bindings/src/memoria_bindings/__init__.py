"""Two-phase wrapper exposing the memoria engine to training loops.

The engine's own step runs retrieval and reinforcement in one call, with
the exploit stage as a callback. A host model, however, computes its
attention (the contribution signal) *between* retrieval and
reinforcement. This wrapper splits the step at exactly that point:

    handle = create({"dim": 64, "n_wm": 16})
    batch = handle.retrieve(embeddings)        # phase 1: cue + search
    weights = attention_over(batch)            # host-side exploitation
    stats = handle.feedback_and_step(weights)  # phase 2: memorize & forget

Phase order is enforced: a second retrieve before feedback, or feedback
without a pending retrieval, raises PhaseError without touching the
engine. Vectors cross the boundary as contiguous row-major float64
copies, never views, so round-trips are numerically exact. A handle
serializes nothing across callers: concurrent use is rejected with
ConcurrencyError. Snapshots written here are interchangeable with the
engine CLI's.
"""

from .handle import ConcurrencyError, EngineHandle, RetrievedBatch, create

bind_create = create

__version__ = "0.1.0"

__all__ = ["EngineHandle", "RetrievedBatch", "create", "bind_create",
           "ConcurrencyError", "__version__"]
