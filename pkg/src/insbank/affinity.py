"""Damped affinity-propagation message passing, convergence detection, and
exemplar extraction. Optionally blends a momentum responsibility matrix into
each iteration with a per-iteration decaying coefficient."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import backend
from .core import EvolutionConfig
from .geometry import SimilarityMatrix

log = logging.getLogger(__name__)


@dataclass
class MessageState:
    R: np.ndarray
    A: np.ndarray
    iteration: int = 0
    converged: bool = False

    @classmethod
    def zeros(cls, n: int) -> "MessageState":
        return cls(R=np.zeros((n, n)), A=np.zeros((n, n)))


def update_responsibility(S: SimilarityMatrix, state: MessageState) -> np.ndarray:
    """Pre-damping responsibility update (excluded max over k' != k)."""
    return backend.responsibility_step(
        np.ascontiguousarray(S.values), np.ascontiguousarray(state.A)
    )


def update_availability(R: np.ndarray) -> np.ndarray:
    """Pre-damping availability update (off-diagonal clamped non-positive)."""
    return backend.availability_step(np.ascontiguousarray(R))


def damp(new: np.ndarray, old: np.ndarray, beta: float) -> np.ndarray:
    """beta * new + (1 - beta) * old, elementwise."""
    return beta * new + (1.0 - beta) * old


def extract_exemplars(state: MessageState) -> tuple[frozenset[int], dict[int, int]]:
    """Exemplars and assignments from Z = A + R.

    Point i picks k' = argmax_k Z[i,k] (ties to the smallest index, which is
    argmax's behavior); i is an exemplar iff k' == i.
    """
    Z = state.A + state.R
    choice = np.argmax(Z, axis=1)
    exemplars = frozenset(int(i) for i in np.nonzero(choice == np.arange(len(choice)))[0])
    assignment = {int(i): int(k) for i, k in enumerate(choice)}
    return exemplars, assignment


def run_ap(
    S: SimilarityMatrix,
    config: EvolutionConfig,
    momentum: Optional[np.ndarray] = None,
    alpha0: Optional[float] = None,
) -> MessageState:
    """Iterate messages until the exemplar set is stable for config.stable_iters
    consecutive iterations or config.max_iters is reached.

    With a momentum matrix, each iteration's responsibility becomes
    alpha_i * M + (1 - alpha_i) * (beta * R_new + (1 - beta) * R_prev),
    where alpha_i decays by config.lam per iteration starting from alpha0.
    Without one, this reduces to plain damping.
    """
    n = S.values.shape[0]
    state = MessageState.zeros(n)
    beta = config.beta
    alpha = config.alpha0 if alpha0 is None else alpha0
    if momentum is None:
        alpha = 0.0
        M = np.zeros((n, n))
    else:
        M = np.ascontiguousarray(momentum, dtype=np.float64)
        if M.shape != (n, n):
            raise ValueError(f"momentum shape {M.shape} != ({n}, {n})")

    last_exemplars: Optional[frozenset[int]] = None
    stable = 0
    for it in range(1, config.max_iters + 1):
        alpha *= config.lam
        R_new = update_responsibility(S, state)
        state.R = backend.blend(
            alpha, M, (1.0 - alpha) * beta, R_new, (1.0 - alpha) * (1.0 - beta), state.R
        )
        A_new = update_availability(state.R)
        state.A = backend.blend(0.0, M, beta, A_new, 1.0 - beta, state.A)
        state.iteration = it

        exemplars, _ = extract_exemplars(state)
        if exemplars and exemplars == last_exemplars:
            stable += 1
            if stable >= config.stable_iters:
                state.converged = True
                break
        else:
            stable = 0
        last_exemplars = exemplars

    if not state.converged and config.max_iters > 0:
        log.warning("affinity propagation did not converge in %d iterations", config.max_iters)
    return state
