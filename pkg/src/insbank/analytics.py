"""Subset statistics, overlap counting, rank correlation, and rank-slice
reporting."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import CandidatePoint, pool_matrix
from .errors import EmptyPool
from .evolution import BankState, rank_bank
from .geometry import euclidean_distances


@dataclass(frozen=True)
class SubsetStats:
    mean_quality: float
    mean_pairwise_euclidean: float
    size: int


def subset_stats(subset: Sequence[CandidatePoint], nearest_neighbor: bool = False) -> SubsetStats:
    """Mean quality and mean pairwise Euclidean distance (diversity).

    With nearest_neighbor=True, diversity is the mean distance to the nearest
    other member instead of the all-pairs mean.
    """
    if not subset:
        raise EmptyPool("subset is empty")
    quality = float(np.mean([p.quality for p in subset]))
    n = len(subset)
    if n == 1:
        return SubsetStats(quality, 0.0, 1)
    D = euclidean_distances(pool_matrix(subset), pool_matrix(subset))
    if nearest_neighbor:
        np.fill_diagonal(D, np.inf)
        diversity = float(np.mean(D.min(axis=1)))
    else:
        iu = np.triu_indices(n, k=1)
        diversity = float(np.mean(D[iu]))
    return SubsetStats(quality, diversity, n)


def overlap_count(subset_a: Iterable[str], subset_b: Iterable[str]) -> int:
    """Number of shared ids."""
    return len(set(subset_a) & set(subset_b))


def _average_ranks(v: np.ndarray) -> np.ndarray:
    """1-based ranks with ties receiving the average rank."""
    order = np.argsort(v, kind="stable")
    ranks = np.empty(len(v), dtype=np.float64)
    i = 0
    while i < len(v):
        j = i
        while j + 1 < len(v) and v[order[j + 1]] == v[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of average-tie rank vectors; NaN for constant input."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.size < 2:
        raise ValueError("spearman needs two equal-length vectors of size >= 2")
    if np.all(x == x[0]) or np.all(y == y[0]):
        return math.nan
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    return float(np.dot(rx, ry) / math.sqrt(np.dot(rx, rx) * np.dot(ry, ry)))


def selection_correlation(
    scored_candidates: Sequence[dict], bank_ids: Iterable[str], top_n: int = 12000
) -> tuple[float, float, float]:
    """Spearman correlation of quality and diversity against bank membership
    among the top candidates by overall score.

    Returns (sp_quality, sp_diversity, sp_diversity - sp_quality).
    """
    bank = set(bank_ids)
    ordered = sorted(scored_candidates, key=lambda r: (-r["overall"], r["id"]))[:top_n]
    flags = [1.0 if r["id"] in bank else 0.0 for r in ordered]
    sp_q = spearman([r["s_q_norm"] for r in ordered], flags)
    sp_d = spearman([r["s_rep_norm"] for r in ordered], flags)
    return sp_q, sp_d, sp_d - sp_q


def orderliness_slices(bank: BankState, parts: int = 3) -> list[list[CandidatePoint]]:
    """Contiguous rank slices of near-equal size; the remainder goes to the
    earlier slices."""
    if parts < 2:
        raise ValueError("parts must be >= 2")
    entries = rank_bank(bank)
    n = len(entries)
    base, rem = divmod(n, parts)
    slices = []
    start = 0
    for i in range(parts):
        size = base + (1 if i < rem else 0)
        slices.append([e.point for e in entries[start : start + size]])
        start += size
    return slices
