"""Shared data types: candidate points, tunables, and bank entries.

All types are frozen after construction and safe to share across workers.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import (
    ConfigError,
    DimensionMismatch,
    DuplicateId,
    EmptyPool,
    NonFiniteValue,
)

COMBINATIONS = ("additive", "multiplicative", "nonlinear")


@dataclass(frozen=True)
class CandidatePoint:
    """One data item: id, embedding, externally supplied quality score."""

    id: str
    embedding: np.ndarray
    quality: float
    source: str = ""
    meta: Optional[Mapping[str, str]] = None

    def __post_init__(self):
        emb = np.asarray(self.embedding, dtype=np.float64)
        emb.setflags(write=False)
        object.__setattr__(self, "embedding", emb)
        if emb.ndim != 1 or emb.size == 0:
            raise DimensionMismatch(f"point {self.id!r}: embedding must be a non-empty vector")
        if not np.all(np.isfinite(emb)):
            raise NonFiniteValue(f"point {self.id!r}: embedding contains non-finite values")
        if not np.isfinite(self.quality):
            raise NonFiniteValue(f"point {self.id!r}: quality is not finite")


@dataclass(frozen=True)
class EvolutionConfig:
    """All tunables of the bank evolution engine.

    Defaults follow the reference hyperparameter setting: alpha0=0.3, lam=0.9,
    beta=0.5, gamma=1, bank_size=6000, batch_size=27000, r_l=0.3, r_h=0.95,
    preference 0 on the similarity diagonal.
    """

    bank_size: int = 6000
    alpha0: float = 0.3
    lam: float = 0.9
    beta: float = 0.5
    gamma: float = 1.0
    combination: str = "multiplicative"
    r_l: float = 0.3
    r_h: float = 0.95
    batch_size: int = 27000
    max_iters: int = 200
    stable_iters: int = 15
    preference: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.bank_size < 1:
            raise ConfigError("bank_size must be positive")
        if not (0.0 <= self.alpha0 <= 1.0):
            raise ConfigError("alpha0 must lie in [0, 1]")
        if not (0.0 < self.lam <= 1.0):
            raise ConfigError("lam must lie in (0, 1]")
        if not (0.0 < self.beta < 1.0):
            raise ConfigError("beta must lie in (0, 1)")
        if self.gamma < 0.0:
            raise ConfigError("gamma must be non-negative")
        if self.combination not in COMBINATIONS:
            raise ConfigError(f"combination must be one of {COMBINATIONS}")
        if not (0.0 < self.r_l < self.r_h < 1.0):
            raise ConfigError("need 0 < r_l < r_h < 1")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be positive")
        if self.batch_size <= self.bank_size:
            raise ConfigError("batch_size must exceed bank_size")
        if self.max_iters < 0:
            raise ConfigError("max_iters must be non-negative")
        if self.stable_iters < 1:
            raise ConfigError("stable_iters must be positive")
        if not np.isfinite(self.preference):
            raise ConfigError("preference must be finite")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, d: Mapping) -> "EvolutionConfig":
        return cls(**dict(d))


@dataclass(frozen=True)
class BankEntry:
    """A selected point plus the scores that earned its rank (1 = best)."""

    point: CandidatePoint
    s_rep: float
    s_rep_norm: float
    s_q_norm: float
    overall: float
    rank: int
    round_added: int


def validate_pool(points: Sequence[CandidatePoint]) -> list[CandidatePoint]:
    """Check uniform embedding dimension and unique ids; returns the pool as a list.

    Per-point finiteness is already enforced by CandidatePoint construction.
    """
    pool = list(points)
    if not pool:
        raise EmptyPool("candidate pool is empty")
    dim = pool[0].embedding.shape[0]
    seen = set()
    for p in pool:
        if p.embedding.shape[0] != dim:
            raise DimensionMismatch(
                f"point {p.id!r}: embedding length {p.embedding.shape[0]} != pool dimension {dim}"
            )
        if p.id in seen:
            raise DuplicateId(f"duplicate id {p.id!r}")
        seen.add(p.id)
    return pool


def pool_matrix(pool: Sequence[CandidatePoint]) -> np.ndarray:
    """Stack pool embeddings into an (n, dim) float64 array."""
    return np.stack([p.embedding for p in pool])
