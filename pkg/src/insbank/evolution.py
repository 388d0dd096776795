"""Round orchestration: batching, history-aware message passing, scoring,
top-m bank replacement, and history extraction."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .affinity import run_ap
from .core import BankEntry, CandidatePoint, EvolutionConfig, validate_pool
from .errors import BudgetExceedsBank, DimensionMismatch, DuplicateId, EmptyPool
from .geometry import negative_euclidean
from .history import HistoryBlocks, assemble_momentum, extract_history
from .scoring import score_candidates


@dataclass
class BankState:
    entries: list[BankEntry]  # ranked, rank 1 first
    history: Optional[HistoryBlocks]
    round: int
    config: EvolutionConfig
    dimension: int
    last_scores: list[dict]  # per-candidate score records of the final batch

    def ids(self) -> list[str]:
        return [e.point.id for e in self.entries]


def _rank_entries(entries: list[BankEntry]) -> list[BankEntry]:
    ordered = sorted(entries, key=lambda e: (-e.overall, e.point.id))
    return [replace(e, rank=i + 1) for i, e in enumerate(ordered)]


def _mini_round(
    interim: list[BankEntry],
    chunk: list[CandidatePoint],
    history: Optional[HistoryBlocks],
    config: EvolutionConfig,
    round_no: int,
):
    """One evolution batch: interim bank plus a chunk of new arrivals."""
    added_round = {e.point.id: e.round_added for e in interim}

    # candidates ordered with history-bank members first so the momentum
    # matrix's copied block lines up; members without history count as new
    if history is not None:
        index = history.bank_index
        hist_present = [e.point for e in interim if e.point.id in index]
        fresh = [e.point for e in interim if e.point.id not in index] + chunk
        candidates = hist_present + fresh
    else:
        hist_present = []
        fresh = [e.point for e in interim] + chunk
        candidates = fresh

    if not candidates:
        raise EmptyPool("no candidates in evolution batch")

    S = negative_euclidean(candidates, preference=config.preference)
    momentum = None
    if history is not None:
        momentum = assemble_momentum(history, [p.id for p in hist_present], fresh).values
    state = run_ap(S, config, momentum=momentum)

    bank_ids = set(added_round)
    bank_mask = np.asarray([p.id in bank_ids for p in candidates])
    qualities = np.asarray([p.quality for p in candidates])
    scores = score_candidates(
        state,
        qualities,
        bank_mask,
        combination=config.combination,
        gamma=config.gamma,
        r_l=config.r_l,
        r_h=config.r_h,
    )

    entries = [
        BankEntry(
            point=p,
            s_rep=float(scores["s_rep"][i]),
            s_rep_norm=float(scores["s_rep_norm"][i]),
            s_q_norm=float(scores["s_q_norm"][i]),
            overall=float(scores["overall"][i]),
            rank=0,
            round_added=added_round.get(p.id, round_no),
        )
        for i, p in enumerate(candidates)
    ]
    ranked = _rank_entries(entries)[: config.bank_size]
    return ranked, state, candidates, scores


def _score_records(candidates, scores, selected_ids) -> list[dict]:
    recs = []
    for i, p in enumerate(candidates):
        recs.append(
            {
                "id": p.id,
                "quality": float(p.quality),
                "s_rep": float(scores["s_rep"][i]),
                "s_rep_norm": float(scores["s_rep_norm"][i]),
                "s_q_norm": float(scores["s_q_norm"][i]),
                "overall": float(scores["overall"][i]),
                "in_bank": p.id in selected_ids,
            }
        )
    return recs


def evolve_round(bank: BankState, new_candidates: Sequence[CandidatePoint]) -> BankState:
    """Ingest newly arrived candidates and re-select the bank.

    Candidates are the current bank plus the arrivals, processed as sequential
    batches of at most config.batch_size points; the interim top-m bank is
    carried into each subsequent batch. History blocks are taken from the
    final batch's converged responsibility matrix.
    """
    config = bank.config
    new_list = list(new_candidates)
    if new_list:
        validate_pool(new_list)
        if new_list[0].embedding.shape[0] != bank.dimension:
            raise DimensionMismatch(
                f"new candidates have dimension {new_list[0].embedding.shape[0]}, "
                f"bank expects {bank.dimension}"
            )
        collisions = set(p.id for p in new_list) & set(bank.ids())
        if collisions:
            raise DuplicateId(f"ids already in bank: {sorted(collisions)[:5]}")
    elif not bank.entries:
        raise EmptyPool("nothing to evolve: empty bank and no new candidates")

    round_no = bank.round + 1
    interim = list(bank.entries)
    pos = 0
    state = candidates = scores = None
    while True:
        room = config.batch_size - len(interim)
        chunk = new_list[pos : pos + room]
        pos += len(chunk)
        interim, state, candidates, scores = _mini_round(
            interim, chunk, bank.history, config, round_no
        )
        if pos >= len(new_list):
            break

    selected_ids = [e.point.id for e in interim]
    pos_by_id = {p.id: i for i, p in enumerate(candidates)}
    history = extract_history(
        final_R=state.R,
        bank_positions=[pos_by_id[i] for i in selected_ids],
        participant_embeddings=np.stack([p.embedding for p in candidates]),
        bank_ids=selected_ids,
    )
    return BankState(
        entries=interim,
        history=history,
        round=round_no,
        config=config,
        dimension=bank.dimension,
        last_scores=_score_records(candidates, scores, set(selected_ids)),
    )


def init_bank(candidates: Sequence[CandidatePoint], config: EvolutionConfig) -> BankState:
    """Build round-0 bank from the first pool with plain damped AP (no history)."""
    pool = validate_pool(candidates)
    empty = BankState(
        entries=[],
        history=None,
        round=-1,
        config=config,
        dimension=pool[0].embedding.shape[0],
        last_scores=[],
    )
    return evolve_round(empty, pool)


def rank_bank(bank: BankState) -> list[BankEntry]:
    """Entries sorted by overall descending (ties by id), ranks 1..m."""
    return _rank_entries(bank.entries)


def extract_budget(bank: BankState, k: int) -> list[CandidatePoint]:
    """Top-k bank points by rank."""
    if not (1 <= k <= len(bank.entries)):
        raise BudgetExceedsBank(f"budget {k} outside 1..{len(bank.entries)}")
    return [e.point for e in rank_bank(bank)[:k]]
