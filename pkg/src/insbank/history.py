"""Momentum responsibility matrix construction from persisted history.

The previous round's final responsibility matrix is persisted as two slices
(bank rows m x p and bank columns p x m) plus the embeddings of all p
participants. The momentum matrix for the next round copies the bank x bank
block, estimates the bank x new and new x bank blocks from cross similarities,
and fills new x new with the median of the rest.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import CandidatePoint, pool_matrix
from .errors import IndexOutOfRange
from .geometry import CrossSimilarityMatrix, cosine_cross_values

log = logging.getLogger(__name__)

_EPS = 1e-12


@dataclass(frozen=True)
class HistoryBlocks:
    """Persisted slices of one round's final responsibility matrix.

    Row j of bank_rows and column j of bank_cols both belong to bank_ids[j];
    participant_positions[j] is that member's index among the p participants.
    """

    bank_rows: np.ndarray  # m x p
    bank_cols: np.ndarray  # p x m
    participant_embeddings: np.ndarray  # p x dim
    bank_ids: tuple[str, ...]
    participant_positions: np.ndarray  # m, indices into 0..p-1

    @property
    def m(self) -> int:
        return self.bank_rows.shape[0]

    @property
    def p(self) -> int:
        return self.bank_rows.shape[1]

    @property
    def bank_index(self) -> dict[str, int]:
        """Bank id -> slot within the slices."""
        return {bid: j for j, bid in enumerate(self.bank_ids)}

    def bank_square(self) -> np.ndarray:
        """The m x m bank-by-bank block of the stored responsibility matrix."""
        return self.bank_rows[:, self.participant_positions]


@dataclass(frozen=True)
class MomentumMatrix:
    values: np.ndarray  # n x n, ordered bank-first then new


def _column_weights(sim: np.ndarray) -> np.ndarray:
    """Normalized non-negative weights per column of a p x q similarity block.

    Negative cosines are clamped to zero before normalization; a column with
    no mass falls back to uniform weights.
    """
    clamped = np.maximum(sim, 0.0)
    sums = clamped.sum(axis=0)
    degenerate = sums < _EPS
    if np.any(degenerate):
        log.warning(
            "%d similarity column(s) degenerate; using uniform weights", int(degenerate.sum())
        )
        clamped[:, degenerate] = 1.0
        sums = clamped.sum(axis=0)
    return clamped / sums[None, :]


def estimate_top_right(bank_rows: np.ndarray, sim: CrossSimilarityMatrix) -> np.ndarray:
    """Estimated responsibilities of new points (cols) as exemplars for bank
    members (rows): a similarity-weighted average of each bank row."""
    w = _column_weights(sim.values)  # p x q
    return bank_rows @ w  # m x q


def estimate_bottom_left(bank_cols: np.ndarray, sim: CrossSimilarityMatrix) -> np.ndarray:
    """Estimated responsibilities of bank members (cols) as exemplars for new
    points (rows): the mirror average over bank columns."""
    w = _column_weights(sim.values)  # p x q
    return w.T @ bank_cols  # q x m


def build_momentum(history: HistoryBlocks, new_pool: Sequence[CandidatePoint]) -> MomentumMatrix:
    """Assemble the full momentum matrix for candidates ordered bank-first."""
    return assemble_momentum(history, history.bank_ids, new_pool)


def assemble_momentum(
    history: HistoryBlocks,
    present_bank_ids: Sequence[str],
    new_pool: Sequence[CandidatePoint],
) -> MomentumMatrix:
    """Like build_momentum, but restricted to the bank members still present.

    Under sequential batching, interim-bank members admitted earlier in the
    same round have no history slice; they are treated as new points here.
    """
    index = history.bank_index
    slots = [index[i] for i in present_bank_ids]
    b = len(slots)
    q = len(new_pool)
    n = b + q
    M = np.empty((n, n))
    bank_rows = history.bank_rows[slots, :]  # b x p
    bank_cols = history.bank_cols[:, slots]  # p x b
    M[:b, :b] = bank_rows[:, history.participant_positions[slots]]

    if q:
        sim = CrossSimilarityMatrix(
            values=cosine_cross_values(history.participant_embeddings, pool_matrix(new_pool))
        )
        M[:b, b:] = estimate_top_right(bank_rows, sim)
        M[b:, :b] = estimate_bottom_left(bank_cols, sim)
        fill = np.median(np.concatenate([M[:b, :b].ravel(), M[:b, b:].ravel(), M[b:, :b].ravel()]))
        M[b:, b:] = fill
    return MomentumMatrix(values=M)


def history_aware_blend(
    M: MomentumMatrix,
    R_new: np.ndarray,
    R_prev_iter: np.ndarray,
    alpha_i: float,
    beta: float,
) -> np.ndarray:
    """alpha_i * M + (1 - alpha_i) * (beta * R_new + (1 - beta) * R_prev_iter)."""
    return alpha_i * M.values + (1.0 - alpha_i) * (beta * R_new + (1.0 - beta) * R_prev_iter)


def extract_history(
    final_R: np.ndarray,
    bank_positions: Sequence[int],
    participant_embeddings: np.ndarray,
    bank_ids: Sequence[str],
) -> HistoryBlocks:
    """Slice the bank rows and columns out of a round's final responsibility
    matrix, keeping every participant's embedding."""
    n = final_R.shape[0]
    positions = list(bank_positions)
    if any(pos < 0 or pos >= n for pos in positions):
        raise IndexOutOfRange(f"bank position outside 0..{n - 1}")
    if len(positions) != len(bank_ids):
        raise IndexOutOfRange("bank_positions and bank_ids length mismatch")
    idx = np.asarray(positions, dtype=np.intp)
    return HistoryBlocks(
        bank_rows=final_R[idx, :].copy(),
        bank_cols=final_R[:, idx].copy(),
        participant_embeddings=np.asarray(participant_embeddings, dtype=np.float64).copy(),
        bank_ids=tuple(bank_ids),
        participant_positions=idx,
    )
