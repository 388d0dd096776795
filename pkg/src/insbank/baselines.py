"""Reference selection strategies: random, kNN1, k-center greedy, quality-
descending traversal with a cosine-dedup threshold, and the two greedy
single-criterion selectors."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import CandidatePoint, pool_matrix, validate_pool
from .errors import BudgetExceedsPool
from .geometry import cosine_cross_values, euclidean_distances


@dataclass(frozen=True)
class SelectionResult:
    selected_ids: tuple[str, ...]  # selection or score order
    strategy: str
    diversity_scores: Optional[dict[str, float]] = None
    shortfall: bool = False  # set when a threshold exhausted candidates before m


def _check_budget(pool: Sequence[CandidatePoint], m: int) -> None:
    if m > len(pool):
        raise BudgetExceedsPool(f"budget {m} exceeds pool size {len(pool)}")
    if m < 1:
        raise BudgetExceedsPool("budget must be positive")


def random_select(pool: Sequence[CandidatePoint], m: int, seed: int) -> SelectionResult:
    """Uniform sample without replacement, deterministic per seed."""
    pool = validate_pool(pool)
    _check_budget(pool, m)
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(pool), size=m, replace=False)
    return SelectionResult(
        selected_ids=tuple(pool[i].id for i in picked), strategy="random"
    )


def knn1_scores(pool: Sequence[CandidatePoint]) -> dict[str, float]:
    """Euclidean distance from each point to its nearest other point."""
    pool = validate_pool(pool)
    emb = pool_matrix(pool)
    D = euclidean_distances(emb, emb)
    np.fill_diagonal(D, np.inf)
    nearest = D.min(axis=1)
    return {p.id: float(nearest[i]) for i, p in enumerate(pool)}


def _minmax(v: np.ndarray) -> np.ndarray:
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        return np.zeros_like(v)
    return (v - lo) / (hi - lo)


def _combine_and_rank(pool, diversity: np.ndarray, gamma: float, m: int, strategy: str):
    """Multiplicative combination of normalized diversity and quality, top-m."""
    q = _minmax(np.asarray([p.quality for p in pool]))
    d = _minmax(diversity)
    combined = (1.0 + d) * (1.0 + q) ** gamma
    order = sorted(range(len(pool)), key=lambda i: (-combined[i], pool[i].id))
    return SelectionResult(
        selected_ids=tuple(pool[i].id for i in order[:m]),
        strategy=strategy,
        diversity_scores={p.id: float(diversity[i]) for i, p in enumerate(pool)},
    )


def knn1_select(pool: Sequence[CandidatePoint], m: int, gamma: float = 1.0) -> SelectionResult:
    pool = validate_pool(pool)
    _check_budget(pool, m)
    scores = knn1_scores(pool)
    diversity = np.asarray([scores[p.id] for p in pool])
    return _combine_and_rank(pool, diversity, gamma, m, "knn1")


def kcenter_greedy(
    pool: Sequence[CandidatePoint], m: int, start_id: Optional[str] = None
) -> SelectionResult:
    """Greedy max-min coverage. Each point's min distance to the selected set
    at its own selection time is recorded as its diversity score."""
    pool = validate_pool(pool)
    _check_budget(pool, m)
    emb = pool_matrix(pool)
    ids = [p.id for p in pool]
    if start_id is None:
        start = min(range(len(pool)), key=lambda i: ids[i])
    else:
        start = ids.index(start_id)

    selected = [start]
    div = {ids[start]: 0.0}
    mind = euclidean_distances(emb, emb[start : start + 1]).ravel()
    for _ in range(m - 1):
        mind[selected] = -np.inf
        u = int(np.argmax(mind))
        div[ids[u]] = float(mind[u])
        selected.append(u)
        d_new = euclidean_distances(emb, emb[u : u + 1]).ravel()
        mind = np.minimum(mind, d_new)
    return SelectionResult(
        selected_ids=tuple(ids[i] for i in selected),
        strategy="kcenter",
        diversity_scores=div,
    )


def kcenter_select(
    pool: Sequence[CandidatePoint], m: int, gamma: float = 1.0,
    start_id: Optional[str] = None,
) -> SelectionResult:
    """k-center diversity scores combined with quality like kNN1.

    The greedy loop runs over the whole pool so every point gets a diversity
    score, then the combined score picks the top-m.
    """
    pool = validate_pool(pool)
    _check_budget(pool, m)
    full = kcenter_greedy(pool, len(pool), start_id=start_id)
    diversity = np.asarray([full.diversity_scores[p.id] for p in pool])
    return _combine_and_rank(pool, diversity, gamma, m, "kcenter")


def deita_select(
    pool: Sequence[CandidatePoint], m: int, threshold: float = 0.9
) -> SelectionResult:
    """Traverse by quality descending; keep a point iff its max cosine
    similarity to the kept set is below the threshold."""
    pool = validate_pool(pool)
    _check_budget(pool, m)
    emb = pool_matrix(pool)
    order = sorted(range(len(pool)), key=lambda i: (-pool[i].quality, pool[i].id))
    kept: list[int] = []
    for i in order:
        if len(kept) >= m:
            break
        if kept:
            sims = cosine_cross_values(emb[i : i + 1], emb[kept]).ravel()
            if float(sims.max()) >= threshold:
                continue
        kept.append(i)
    return SelectionResult(
        selected_ids=tuple(pool[i].id for i in kept),
        strategy="deita",
        shortfall=len(kept) < m,
    )


def diversity_greedy(
    pool: Sequence[CandidatePoint], s_rep: dict[str, float], m: int
) -> SelectionResult:
    """Top-m by an externally computed representativeness score."""
    pool = validate_pool(pool)
    _check_budget(pool, m)
    order = sorted(pool, key=lambda p: (-s_rep[p.id], p.id))
    return SelectionResult(
        selected_ids=tuple(p.id for p in order[:m]),
        strategy="dg",
        diversity_scores={p.id: float(s_rep[p.id]) for p in pool},
    )


def quality_greedy(pool: Sequence[CandidatePoint], m: int) -> SelectionResult:
    """Top-m by raw quality."""
    pool = validate_pool(pool)
    _check_budget(pool, m)
    order = sorted(pool, key=lambda p: (-p.quality, p.id))
    return SelectionResult(selected_ids=tuple(p.id for p in order[:m]), strategy="qg")
