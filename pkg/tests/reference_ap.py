"""Independent plain-sequential affinity-propagation oracle.

Pure-Python nested loops, no numpy in the update rules, summations in
ascending index order. Kept deliberately separate from the package so the
vectorized implementation is checked against an implementation that shares
no code with it.
"""
import math


def reference_ap(S, beta=0.5, max_iters=200, stable_iters=15):
    """Returns (exemplar frozenset, converged flag)."""
    n = len(S)
    R = [[0.0] * n for _ in range(n)]
    A = [[0.0] * n for _ in range(n)]

    def exemplars():
        out = set()
        for i in range(n):
            best_k, best_v = 0, -math.inf
            for k in range(n):
                v = A[i][k] + R[i][k]
                if v > best_v:
                    best_v, best_k = v, k
            if best_k == i:
                out.add(i)
        return frozenset(out)

    last = None
    stable = 0
    for _ in range(max_iters):
        R_new = [[0.0] * n for _ in range(n)]
        for i in range(n):
            for k in range(n):
                mx = -math.inf
                for k2 in range(n):
                    if k2 != k:
                        v = A[i][k2] + S[i][k2]
                        if v > mx:
                            mx = v
                if mx == -math.inf:
                    mx = 0.0
                R_new[i][k] = S[i][k] - mx
        for i in range(n):
            for k in range(n):
                R[i][k] = beta * R_new[i][k] + (1.0 - beta) * R[i][k]

        A_new = [[0.0] * n for _ in range(n)]
        for k in range(n):
            for i in range(n):
                if i == k:
                    total = 0.0
                    for i2 in range(n):
                        if i2 != k and R[i2][k] > 0.0:
                            total += R[i2][k]
                    A_new[k][k] = total
                else:
                    total = R[k][k]
                    for i2 in range(n):
                        if i2 != i and i2 != k and R[i2][k] > 0.0:
                            total += R[i2][k]
                    A_new[i][k] = min(0.0, total)
        for i in range(n):
            for k in range(n):
                A[i][k] = beta * A_new[i][k] + (1.0 - beta) * A[i][k]

        ex = exemplars()
        if ex and ex == last:
            stable += 1
            if stable >= stable_iters:
                return ex, True
        else:
            stable = 0
        last = ex
    return exemplars(), False
