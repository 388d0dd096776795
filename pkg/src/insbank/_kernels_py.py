"""Pure-numpy message-passing kernels. Fallback backend when the compiled
extension is unavailable; same contract as insbank._kernels."""
from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def responsibility_step(S: np.ndarray, A: np.ndarray) -> np.ndarray:
    """Pre-damping responsibility update:
    R[i,k] = S[i,k] - max_{k' != k} (A[i,k'] + S[i,k'])
    The empty max for n=1 is taken as 0, so R = S there.
    """
    n = S.shape[0]
    if n == 1:
        return S.copy()
    AS = A + S
    rows = np.arange(n)
    idx1 = np.argmax(AS, axis=1)
    max1 = AS[rows, idx1]
    AS[rows, idx1] = -np.inf
    max2 = np.max(AS, axis=1)
    R = S - max1[:, None]
    R[rows, idx1] = S[rows, idx1] - max2
    return R


def availability_step(R: np.ndarray) -> np.ndarray:
    """Pre-damping availability update:
    A[i,k] = min(0, R[k,k] + sum_{i' not in {i,k}} max(0, R[i',k]))  for i != k
    A[k,k] = sum_{i' != k} max(0, R[i',k])
    """
    n = R.shape[0]
    if n == 1:
        return np.zeros_like(R)
    Rp = np.maximum(R, 0.0)
    diag = np.diagonal(R).copy()
    np.fill_diagonal(Rp, diag)
    colsum = np.sum(Rp, axis=0)
    A = colsum[None, :] - Rp
    dA = np.diagonal(A).copy()
    np.minimum(A, 0.0, out=A)
    np.fill_diagonal(A, dA)
    return A


def blend(coef_a: float, Ma: np.ndarray, coef_b: float, Mb: np.ndarray,
          coef_c: float, Mc: np.ndarray) -> np.ndarray:
    """coef_a*Ma + coef_b*Mb + coef_c*Mc, elementwise."""
    out = coef_a * Ma
    out += coef_b * Mb
    out += coef_c * Mc
    return out
