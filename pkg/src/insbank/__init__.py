"""Progressive diverse-subset selection: a fixed-size ranked bank of
embedding + quality data points, evolved across arriving batches with
history-aware affinity propagation."""

from .backend import BACKEND
from .core import BankEntry, CandidatePoint, EvolutionConfig, validate_pool
from .evolution import BankState, evolve_round, extract_budget, init_bank, rank_bank

__all__ = [
    "BACKEND",
    "BankEntry",
    "BankState",
    "CandidatePoint",
    "EvolutionConfig",
    "validate_pool",
    "init_bank",
    "evolve_round",
    "rank_bank",
    "extract_budget",
]

__version__ = "0.1.0"
