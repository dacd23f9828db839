"""Compiled inner loop for adaptive-policy replications.

This mirrors :func:`duelsim.policies.dts_select` and
:func:`duelsim.policies.dts_update` step for step, trading the numpy
Generator for numba's internal bit stream so a full replication runs in
a few microseconds per duel.  The equivalence tests in the suite keep
the two implementations in lockstep; change one, change both.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def dts_replication(
    p: np.ndarray,
    horizon: int,
    checkpoints: np.ndarray,
    alpha_explore: float,
    seed: int,
) -> np.ndarray:
    """Run one adaptive replication and snapshot win counts.

    Args:
        p: ``(k, k)`` preference matrix.
        horizon: Number of duels to run.
        checkpoints: Ascending int64 duel indices (1-based) at which to
            record the win-count matrix; the last entry is the horizon.
        alpha_explore: Confidence-bound width constant.
        seed: Seed for the kernel's private bit stream.

    Returns:
        ``(len(checkpoints), k, k)`` int64 array of win-count snapshots.
    """
    np.random.seed(seed)
    k = p.shape[0]
    b = np.zeros((k, k), np.int64)
    theta = np.zeros((k, k))
    zeta = np.zeros(k, np.int64)
    ties = np.zeros(k, np.int64)
    out = np.zeros((checkpoints.size, k, k), np.int64)
    cp = 0
    for step in range(horizon):
        t = step + 1
        log_t = np.log(t)

        # Phase 1: count opponents whose upper bound keeps arm i alive.
        # An unobserved pair has upper bound 1 and always counts.
        for i in range(k):
            cnt = 0
            for j in range(k):
                if i == j:
                    continue
                n_ij = b[i, j] + b[j, i]
                if n_ij == 0:
                    cnt += 1
                else:
                    p_hat = b[i, j] / n_ij
                    c = np.sqrt(alpha_explore * log_t / n_ij)
                    if p_hat + c > 0.5:
                        cnt += 1
            zeta[i] = cnt
        zeta_max = zeta.max()

        # Phase 2: one posterior draw per unordered pair, antisymmetric.
        for i in range(k):
            theta[i, i] = 0.5
        for i in range(k):
            for j in range(i + 1, k):
                th = np.random.beta(b[i, j] + 1.0, b[j, i] + 1.0)
                theta[i, j] = th
                theta[j, i] = 1.0 - th

        # Phase 3: first arm = most posterior wins among phase-1 argmax,
        # ties uniform.
        best = -1
        n_tie = 0
        for i in range(k):
            if zeta[i] != zeta_max:
                continue
            w = 0
            for j in range(k):
                if j != i and theta[i, j] > 0.5:
                    w += 1
            if w > best:
                best = w
                n_tie = 1
                ties[0] = i
            elif w == best:
                ties[n_tie] = i
                n_tie += 1
        if n_tie > 1:
            first = ties[np.random.randint(0, n_tie)]
        else:
            first = ties[0]

        # Phase 4: challenger = best fresh posterior draw against the
        # first arm, restricted to arms whose lower bound does not
        # already exceed 0.5; fall back to uniform if none qualify.
        best_th = -1.0
        n_tie2 = 0
        for i in range(k):
            if i == first:
                continue
            n_if = b[i, first] + b[first, i]
            if n_if == 0:
                low = 0.0
            else:
                p_hat = b[i, first] / n_if
                low = p_hat - np.sqrt(alpha_explore * log_t / n_if)
            if low <= 0.5:
                th2 = np.random.beta(b[i, first] + 1.0, b[first, i] + 1.0)
                if th2 > best_th:
                    best_th = th2
                    n_tie2 = 1
                    ties[0] = i
                elif th2 == best_th:
                    ties[n_tie2] = i
                    n_tie2 += 1
        if n_tie2 == 0:
            j = np.random.randint(0, k - 1)
            second = j if j < first else j + 1
        elif n_tie2 == 1:
            second = ties[0]
        else:
            second = ties[np.random.randint(0, n_tie2)]

        # Duel and bookkeeping.
        if np.random.random() < p[first, second]:
            b[first, second] += 1
        else:
            b[second, first] += 1
        if cp < checkpoints.size and t == checkpoints[cp]:
            out[cp] = b
            cp += 1
    return out
