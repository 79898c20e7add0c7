"""Line-delimited step trace: the contract between simulator, oracle and
analysis.

Each line is one JSON object. The first line is a header; every engine
step appends one step record; engine resets append a reset marker.

Header:
    {"memoria_trace": 1, "config": {...}}

Step record, fields always in this order:
    {"step": int,
     "created": [id, ...],            ids created this step, input order
     "wm": [id, ...],                 the cue batch (same ids as created)
     "stm_rem": [id, ...],            retrieved short-term, score order
     "ltm_rem": [id, ...],            retrieved long-term, score order
     "ltm_found": [id, ...],          explored long-term set, ascending
     "scores": {"id": float, ...},    correlation score per retrieved id
     "increments": {"id": float, ...} lifespan increment per retrieved id
     "pruned": [id, ...],             removed this step
     "promoted_stm": [id, ...],       moved working -> short-term
     "promoted_ltm": [id, ...],       moved short-term -> long-term
     "stm_size": int,                 sizes measured after the step
     "ltm_size": int,
     "total_lifespan": float}

Reset marker:
    {"reset": int}                    step index at which memory was cleared

Identical runs produce byte-identical trace files: orderings are
deterministic and floats are serialized with shortest round-trip repr.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .config import Config
from .errors import TraceError

FORMAT_VERSION = 1


@dataclass
class TraceRecord:
    """One step record, ids as ints."""

    step: int
    created: list[int]
    wm: list[int]
    stm_rem: list[int]
    ltm_rem: list[int]
    ltm_found: list[int]
    scores: dict[int, float]
    increments: dict[int, float]
    pruned: list[int]
    promoted_stm: list[int]
    promoted_ltm: list[int]
    stm_size: int
    ltm_size: int
    total_lifespan: float
    reset_before: bool = False

    @property
    def rem(self) -> list[int]:
        return self.stm_rem + self.ltm_rem

    @property
    def act(self) -> list[int]:
        return self.wm + self.stm_rem + self.ltm_rem


@dataclass
class TraceLog:
    """A parsed trace: the run's config plus its step records in order."""

    records: list[TraceRecord] = field(default_factory=list)
    config: Config | None = None
    resets: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


class TraceWriter:
    """Appends trace lines to an open text stream."""

    def __init__(self, stream, config: Config | None = None):
        self._stream = stream
        if config is not None:
            self._emit({"memoria_trace": FORMAT_VERSION,
                        "config": config.to_dict()})

    def _emit(self, obj) -> None:
        self._stream.write(json.dumps(obj, separators=(",", ":")))
        self._stream.write("\n")

    def write_step(self, report, state) -> None:
        self._emit({
            "step": report.step,
            "created": report.created,
            "wm": report.retrieved.wm,
            "stm_rem": report.retrieved.stm_rem,
            "ltm_rem": report.retrieved.ltm_rem,
            "ltm_found": report.retrieved.ltm_found,
            "scores": {str(i): v for i, v in report.retrieved.scores.items()},
            "increments": {str(i): v for i, v in report.increments.items()},
            "pruned": report.pruned,
            "promoted_stm": report.promoted_to_stm,
            "promoted_ltm": report.promoted_to_ltm,
            "stm_size": state.stm_size(),
            "ltm_size": state.ltm_size(),
            "total_lifespan": state.total_lifespan(),
        })

    def write_reset(self, step: int) -> None:
        self._emit({"reset": step})


_STEP_FIELDS = (
    "step", "created", "wm", "stm_rem", "ltm_rem", "ltm_found", "scores",
    "increments", "pruned", "promoted_stm", "promoted_ltm", "stm_size",
    "ltm_size", "total_lifespan",
)


def parse_trace(lines) -> TraceLog:
    """Parse and validate trace lines into a TraceLog.

    Validates that step indices strictly increase and that every id is
    referenced only between its creation and its removal. Raises
    TraceError with the offending line number otherwise.
    """
    log = TraceLog()
    born: set[int] = set()
    live: set[int] = set()
    last_step = -1
    pending_reset = False
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceError(f"invalid JSON: {exc}", lineno) from exc
        if not isinstance(obj, dict):
            raise TraceError("record is not an object", lineno)
        if "memoria_trace" in obj:
            if obj["memoria_trace"] != FORMAT_VERSION:
                raise TraceError(
                    f"unsupported trace version {obj['memoria_trace']}", lineno)
            if "config" in obj:
                log.config = Config.from_dict(obj["config"])
            continue
        if "reset" in obj:
            log.resets.append(int(obj["reset"]))
            live.clear()
            pending_reset = True
            continue
        missing = [f for f in _STEP_FIELDS if f not in obj]
        if missing:
            raise TraceError(f"missing fields {missing}", lineno)
        step = int(obj["step"])
        if step <= last_step:
            raise TraceError(
                f"step {step} does not increase past {last_step}", lineno)
        last_step = step
        created = [int(i) for i in obj["created"]]
        for i in created:
            if i in born:
                raise TraceError(f"id {i} created twice", lineno)
            born.add(i)
            live.add(i)
        record = TraceRecord(
            step=step,
            created=created,
            wm=[int(i) for i in obj["wm"]],
            stm_rem=[int(i) for i in obj["stm_rem"]],
            ltm_rem=[int(i) for i in obj["ltm_rem"]],
            ltm_found=[int(i) for i in obj["ltm_found"]],
            scores={int(k): float(v) for k, v in obj["scores"].items()},
            increments={int(k): float(v)
                        for k, v in obj["increments"].items()},
            pruned=[int(i) for i in obj["pruned"]],
            promoted_stm=[int(i) for i in obj["promoted_stm"]],
            promoted_ltm=[int(i) for i in obj["promoted_ltm"]],
            stm_size=int(obj["stm_size"]),
            ltm_size=int(obj["ltm_size"]),
            total_lifespan=float(obj["total_lifespan"]),
            reset_before=pending_reset,
        )
        pending_reset = False
        referenced = (record.wm + record.stm_rem + record.ltm_rem
                      + record.ltm_found + record.pruned
                      + record.promoted_stm + record.promoted_ltm
                      + list(record.scores) + list(record.increments))
        for i in referenced:
            if i not in live:
                state = "unknown" if i not in born else "already removed"
                raise TraceError(f"id {i} referenced while {state}", lineno)
        live.difference_update(record.pruned)
        log.records.append(record)
    return log


def read_trace(path) -> TraceLog:
    """Read and validate a trace file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_trace(fh)
