"""Engine hyperparameters.

Defaults are the reference word-level language-modeling settings: initial
lifespan 9, lifespan extend scale 8, search depth 10, 50 engrams per tier
selection, short-term capacity 400.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

from .errors import ConfigError


@dataclass(frozen=True)
class Config:
    """All engine hyperparameters.

    dim               dimensionality d of engram vectors
    n_wm              max engrams created per step (working-memory size)
    stm_capacity      fixed FIFO capacity of short-term memory
    n_stm_rem         engrams retrieved from short-term memory per step
    n_ltm_rem         engrams retrieved from long-term memory per step
    n_depth           graph exploration depth for long-term retrieval
    initial_lifespan  lifespan assigned to every new engram (time steps)
    alpha             lifespan extend scale applied to retrieval increments
    """

    dim: int
    n_wm: int = 50
    stm_capacity: int = 400
    n_stm_rem: int = 50
    n_ltm_rem: int = 50
    n_depth: int = 10
    initial_lifespan: float = 9.0
    alpha: float = 8.0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.dim <= 0:
            raise ConfigError(f"dim must be positive, got {self.dim}")
        if self.n_wm <= 0:
            raise ConfigError(f"n_wm must be positive, got {self.n_wm}")
        if self.stm_capacity <= 0:
            raise ConfigError(
                f"stm_capacity must be positive, got {self.stm_capacity}")
        if self.n_stm_rem <= 0:
            raise ConfigError(
                f"n_stm_rem must be positive, got {self.n_stm_rem}")
        if self.n_stm_rem > self.stm_capacity:
            raise ConfigError(
                f"n_stm_rem ({self.n_stm_rem}) cannot exceed stm_capacity "
                f"({self.stm_capacity})")
        if self.n_ltm_rem <= 0:
            raise ConfigError(
                f"n_ltm_rem must be positive, got {self.n_ltm_rem}")
        if self.n_depth < 0:
            raise ConfigError(
                f"n_depth must be non-negative, got {self.n_depth}")
        if not self.initial_lifespan > 0:
            raise ConfigError(
                f"initial_lifespan must be positive, got {self.initial_lifespan}")
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Config":
        known = {f: d[f] for f in cls.__dataclass_fields__ if f in d}
        extra = set(d) - set(cls.__dataclass_fields__)
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if "dim" not in known:
            raise ConfigError("config requires 'dim'")
        known["dim"] = int(known["dim"])
        for key in ("n_wm", "stm_capacity", "n_stm_rem", "n_ltm_rem", "n_depth"):
            if key in known:
                known[key] = int(known[key])
        for key in ("initial_lifespan", "alpha"):
            if key in known:
                known[key] = float(known[key])
        return cls(**known)
