"""Representativeness scoring, normalization, the nonlinear quality map, and
the diversity/quality combiners."""
from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from .affinity import MessageState
from .errors import DegeneratePercentiles

log = logging.getLogger(__name__)


def representativeness(state: MessageState) -> np.ndarray:
    """Per-point votes received minus votes cast, plus the self-vote, from
    Z = A + R: s_rep[k] = colsum_k(Z) - rowsum_k(Z) + Z[k,k]."""
    Z = state.A + state.R
    return Z.sum(axis=0) - Z.sum(axis=1) + np.diagonal(Z)


def normalize_scores(
    s_rep: np.ndarray, s_q: np.ndarray, bank_mask: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Min-max normalization with asymmetric ranges for representativeness:
    the min is taken over current bank members only, the max over all
    candidates. Quality uses the plain global min/max. With no bank members
    (round zero) the representativeness min falls back to the global min.

    Values are not clamped; s_rep_norm may leave [0, 1]. A degenerate range
    (max == min) yields all zeros plus a warning.
    """
    rep_min = float(np.min(s_rep[bank_mask])) if np.any(bank_mask) else float(np.min(s_rep))
    rep_max = float(np.max(s_rep))
    q_min, q_max = float(np.min(s_q)), float(np.max(s_q))

    if rep_max == rep_min:
        log.warning("degenerate representativeness range; normalized scores set to 0")
        rep_norm = np.zeros_like(s_rep)
    else:
        rep_norm = (s_rep - rep_min) / (rep_max - rep_min)
    if q_max == q_min:
        log.warning("degenerate quality range; normalized scores set to 0")
        q_norm = np.zeros_like(s_q)
    else:
        q_norm = (s_q - q_min) / (q_max - q_min)
    return rep_norm, q_norm


def combine_additive(s_rep_norm: np.ndarray, s_q_norm: np.ndarray, gamma: float) -> np.ndarray:
    return s_rep_norm + gamma * s_q_norm


def combine_multiplicative(
    s_rep_norm: np.ndarray, s_q_norm: np.ndarray, gamma: float
) -> np.ndarray:
    return (1.0 + s_rep_norm) * (1.0 + s_q_norm) ** gamma


def nonlinear_quality_map(s_q_norm: np.ndarray, r_l: float, r_h: float) -> np.ndarray:
    """Sigmoid remap of normalized quality, steep between the r_l and r_h
    percentiles and flat outside them.

    tau_l, tau_h are linear-interpolation percentiles of the input;
    c_mul = 4 / (tau_h - tau_l); c_sub = tau_l + 2 / c_mul (the midpoint).
    """
    s_q_norm = np.asarray(s_q_norm, dtype=np.float64)
    tau_l = float(np.quantile(s_q_norm, r_l))
    tau_h = float(np.quantile(s_q_norm, r_h))
    if tau_h - tau_l < 1e-12:
        raise DegeneratePercentiles(f"tau_h - tau_l = {tau_h - tau_l:.3e} is too small")
    c_mul = 4.0 / (tau_h - tau_l)
    c_sub = tau_l + 2.0 / c_mul
    assert abs(c_sub - (tau_l + tau_h) / 2.0) < 1e-9  # midpoint simplification
    z = (s_q_norm - c_sub) * c_mul
    return 1.0 / (1.0 + np.exp(-z))


def combine_nonlinear(s_rep_norm: np.ndarray, s_q_mapped: np.ndarray, gamma: float) -> np.ndarray:
    """Multiplicative combiner applied to the sigmoid-mapped quality."""
    return combine_multiplicative(s_rep_norm, s_q_mapped, gamma)


def score_candidates(
    state: MessageState,
    s_q: np.ndarray,
    bank_mask: np.ndarray,
    combination: str,
    gamma: float,
    r_l: float,
    r_h: float,
) -> dict[str, np.ndarray]:
    """Full scoring pipeline for one converged run; returns aligned vectors."""
    s_rep = representativeness(state)
    rep_norm, q_norm = normalize_scores(s_rep, np.asarray(s_q, dtype=np.float64), bank_mask)
    out = {"s_rep": s_rep, "s_rep_norm": rep_norm, "s_q_norm": q_norm}
    if combination == "additive":
        out["overall"] = combine_additive(rep_norm, q_norm, gamma)
    elif combination == "multiplicative":
        out["overall"] = combine_multiplicative(rep_norm, q_norm, gamma)
    elif combination == "nonlinear":
        mapped = nonlinear_quality_map(q_norm, r_l, r_h)
        out["s_q_mapped"] = mapped
        out["overall"] = combine_nonlinear(rep_norm, mapped, gamma)
    else:
        raise ValueError(f"unknown combination {combination!r}")
    return out
