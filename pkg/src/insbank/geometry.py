"""Similarity and distance kernels shared by the affinity, history, baseline
and analytics modules. All math in float64."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import CandidatePoint, pool_matrix
from .errors import ZeroVector


@dataclass(frozen=True)
class SimilarityMatrix:
    """Dense n x n similarity with a scalar preference on the diagonal."""

    values: np.ndarray
    kind: str = "negative_euclidean"
    preference: float = 0.0


@dataclass(frozen=True)
class CrossSimilarityMatrix:
    """p x q cosine similarities between an old set (rows) and a new set (columns)."""

    values: np.ndarray


def euclidean_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise Euclidean distances between rows of a and rows of b."""
    # sq-norm expansion is fast but can go slightly negative; clip before sqrt
    sq = (
        np.sum(a * a, axis=1)[:, None]
        + np.sum(b * b, axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    np.clip(sq, 0.0, None, out=sq)
    return np.sqrt(sq)


def negative_euclidean(pool: Sequence[CandidatePoint], preference: float = 0.0) -> SimilarityMatrix:
    """S[i, k] = -||e_i - e_k||; the diagonal is filled with the preference value."""
    emb = pool_matrix(pool)
    values = -euclidean_distances(emb, emb)
    np.fill_diagonal(values, preference)
    return SimilarityMatrix(values=values, preference=preference)


def _unit_rows(emb: np.ndarray, what: str) -> np.ndarray:
    norms = np.linalg.norm(emb, axis=1)
    zero = np.nonzero(norms == 0.0)[0]
    if zero.size:
        raise ZeroVector(f"{what}: zero-norm embedding at position {int(zero[0])}")
    return emb / norms[:, None]


def cosine_cross(
    old_pool: Sequence[CandidatePoint], new_pool: Sequence[CandidatePoint]
) -> CrossSimilarityMatrix:
    """Cosine similarity between every old point (rows) and new point (columns)."""
    return CrossSimilarityMatrix(
        values=cosine_cross_values(pool_matrix(old_pool), pool_matrix(new_pool))
    )


def cosine_cross_values(old_emb: np.ndarray, new_emb: np.ndarray) -> np.ndarray:
    a = _unit_rows(old_emb, "old pool")
    b = _unit_rows(new_emb, "new pool")
    return a @ b.T


def pairwise_cosine_max(point: CandidatePoint, subset: Sequence[CandidatePoint]) -> float:
    """Largest cosine similarity between `point` and any member of `subset`."""
    if not subset:
        raise ZeroVector("subset is empty")
    sims = cosine_cross_values(point.embedding[None, :], pool_matrix(subset))
    return float(np.max(sims))
