"""Stationary preference matrices and duel-level primitives.

A preference matrix ``P`` holds the probability that the row arm beats the
column arm in a head-to-head presentation.  Rows and columns are arms, the
diagonal is one half, and ``P[m, n] + P[n, m] == 1`` for every pair.  All
simulation code in the package funnels matrix construction through
:func:`new_preference_matrix` so the invariants are checked exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AttemptsExhausted,
    ComplementViolation,
    InvalidWinner,
    RangeError,
    ShapeError,
)

# Allowed slack when checking P[i, j] + P[j, i] == 1 on trusted inputs.
COMPLEMENT_TOL = 1e-9


@dataclass(frozen=True)
class PreferenceMatrix:
    """Validated pairwise win probabilities over ``k`` arms.

    Attributes:
        p: Read-only ``(k, k)`` float array, ``p[m, n]`` being the
            probability that arm ``m`` wins a duel against arm ``n``.
    """

    p: np.ndarray

    @property
    def k(self) -> int:
        """Number of arms."""
        return self.p.shape[0]

    def restrict(self, indices: tuple[int, ...]) -> "PreferenceMatrix":
        """Return the sub-matrix over ``indices`` as a new validated matrix."""
        idx = np.asarray(indices, dtype=np.intp)
        return new_preference_matrix(self.p[np.ix_(idx, idx)])


@dataclass(frozen=True)
class WinnerAnalysis:
    """Summary of which arms dominate a preference matrix.

    Attributes:
        condorcet_winner: Arm beating every other arm pairwise, or ``None``.
        copeland_scores: Per-arm fraction of opponents beaten, in ``[0, 1]``.
        copeland_winners: Arms attaining the maximal Copeland score.
        reference_arm: The Condorcet winner when one exists, otherwise the
            lowest-index Copeland winner; used as the regret baseline.
    """

    condorcet_winner: int | None
    copeland_scores: np.ndarray
    copeland_winners: frozenset[int]
    reference_arm: int


@dataclass(frozen=True)
class DuelOutcome:
    """Record of a single completed duel.

    Attributes:
        t: One-based index of the duel within its run.
        first: Arm shown in the first slot.
        second: Arm shown in the second slot.
        winner: The arm that won; must be ``first`` or ``second``.
    """

    t: int
    first: int
    second: int
    winner: int

    def __post_init__(self) -> None:
        if self.t < 1:
            raise RangeError(f"duel index must be >= 1, got {self.t}")
        if self.first == self.second:
            raise InvalidWinner("a duel needs two distinct arms")
        if self.winner not in (self.first, self.second):
            raise InvalidWinner(
                f"winner {self.winner} is neither arm {self.first} nor {self.second}"
            )


def new_preference_matrix(entries: np.ndarray) -> PreferenceMatrix:
    """Validate ``entries`` and wrap them in a :class:`PreferenceMatrix`.

    Args:
        entries: Square array-like of win probabilities.

    Returns:
        A matrix backed by a read-only float copy of ``entries``.

    The diagonal is overwritten with 0.5 regardless of its input values;
    self-duels never occur, so the stored value is purely a convention that
    keeps the complement identity uniform.

    Raises:
        ShapeError: If the input is not square with at least two arms.
        RangeError: If any entry falls outside ``[0, 1]``.
        ComplementViolation: If ``entries[i, j] + entries[j, i]`` differs
            from one by more than ``COMPLEMENT_TOL`` for any ``i != j``.
    """
    p = np.array(entries, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {p.shape}")
    if p.shape[0] < 2:
        raise ShapeError("need at least two arms")
    if np.any(p < 0.0) or np.any(p > 1.0) or not np.all(np.isfinite(p)):
        bad = np.argwhere(~((p >= 0.0) & (p <= 1.0)))[0]
        raise RangeError(
            f"entry ({bad[0]}, {bad[1]}) = {p[bad[0], bad[1]]} is outside [0, 1]"
        )
    np.fill_diagonal(p, 0.5)
    residual = np.abs(p + p.T - 1.0)
    if np.any(residual > COMPLEMENT_TOL):
        bad = np.argwhere(residual > COMPLEMENT_TOL)[0]
        raise ComplementViolation(
            f"entries ({bad[0]}, {bad[1]}) and ({bad[1]}, {bad[0]}) sum to "
            f"{p[bad[0], bad[1]] + p[bad[1], bad[0]]}, expected 1"
        )
    p.setflags(write=False)
    return PreferenceMatrix(p=p)


def zero_effect_matrix(k: int) -> PreferenceMatrix:
    """Return the ``k``-arm matrix where every duel is a fair coin flip."""
    if k < 2:
        raise ShapeError("need at least two arms")
    return new_preference_matrix(np.full((k, k), 0.5))


def generate_effect_matrix(
    k: int,
    delta: float,
    rng: np.random.Generator,
    require_condorcet: bool = True,
    max_attempts: int = 10_000,
) -> PreferenceMatrix:
    """Draw a matrix whose off-diagonal effects all have magnitude ``delta``.

    Each unordered pair gets ``P[i, j] = 0.5 + delta`` or ``0.5 - delta``
    with equal probability, independently across pairs.  With
    ``require_condorcet`` the draw is rejected until some arm beats all
    others, so the regret baseline is well defined.

    Args:
        k: Number of arms.
        delta: Effect magnitude, in ``(0, 0.5]``.
        rng: Source of randomness for the orientations.
        require_condorcet: Reject draws without a Condorcet winner.
        max_attempts: Rejection budget before giving up.

    Returns:
        A validated matrix with ``|P[i, j] - 0.5| == delta`` off diagonal.

    Raises:
        RangeError: If ``delta`` is outside ``(0, 0.5]``.
        AttemptsExhausted: If no accepted draw occurs within the budget.
    """
    if not 0.0 < delta <= 0.5:
        raise RangeError(f"delta must be in (0, 0.5], got {delta}")
    if k < 2:
        raise ShapeError("need at least two arms")
    iu = np.triu_indices(k, 1)
    for _ in range(max_attempts):
        signs = rng.integers(0, 2, size=len(iu[0])) * 2 - 1
        p = np.full((k, k), 0.5)
        p[iu] = 0.5 + delta * signs
        p.T[iu] = 1.0 - p[iu]
        matrix = new_preference_matrix(p)
        if not require_condorcet:
            return matrix
        if analyze_winners(matrix).condorcet_winner is not None:
            return matrix
    raise AttemptsExhausted(
        f"no Condorcet-winner matrix found in {max_attempts} attempts"
    )


def delta(matrix: PreferenceMatrix, m: int, n: int) -> float:
    """Return the effect ``P[m, n] - 0.5`` for two distinct arms.

    Raises:
        IndexError: If ``m == n`` or either index is out of range.
    """
    k = matrix.k
    if not (0 <= m < k and 0 <= n < k):
        raise IndexError(f"arm index out of range for k={k}: ({m}, {n})")
    if m == n:
        raise IndexError("effect is undefined for an arm against itself")
    return float(matrix.p[m, n] - 0.5)


def sample_duel(matrix: PreferenceMatrix, m: int, n: int, u: float) -> int:
    """Resolve one duel between arms ``m`` and ``n`` from a uniform draw.

    Args:
        u: A uniform random draw in ``[0, 1)``; threshold semantics make
            the winner a deterministic function of the draw, which keeps
            vectorized and scalar simulation paths interchangeable.

    Returns:
        ``m`` if ``u < P[m, n]``, else ``n``.

    Raises:
        IndexError: If ``m == n`` or either index is out of range.
    """
    k = matrix.k
    if not (0 <= m < k and 0 <= n < k):
        raise IndexError(f"arm index out of range for k={k}: ({m}, {n})")
    if m == n:
        raise IndexError("an arm cannot duel itself")
    return m if u < matrix.p[m, n] else n


def analyze_winners(matrix: PreferenceMatrix) -> WinnerAnalysis:
    """Compute Condorcet and Copeland winners of a preference matrix.

    The Copeland score of arm ``i`` is the number of opponents ``j`` with
    ``P[i, j] > 0.5``, normalized by ``k - 1``.  A Condorcet winner is an
    arm with score exactly one; at most one such arm can exist.
    """
    p = matrix.p
    k = matrix.k
    beats = p > 0.5
    np.fill_diagonal(beats, False)
    wins = beats.sum(axis=1)
    scores = wins / (k - 1)
    condorcet = None
    full = np.flatnonzero(wins == k - 1)
    if full.size == 1:
        condorcet = int(full[0])
    winners = frozenset(int(i) for i in np.flatnonzero(wins == wins.max()))
    reference = condorcet if condorcet is not None else min(winners)
    scores.setflags(write=False)
    return WinnerAnalysis(
        condorcet_winner=condorcet,
        copeland_scores=scores,
        copeland_winners=winners,
        reference_arm=reference,
    )


def step_strong_regret(
    matrix: PreferenceMatrix, reference: int, m: int, n: int
) -> float:
    """Regret of presenting the pair ``(m, n)`` instead of the reference arm.

    The cost is ``(P[ref, m] - 0.5) + (P[ref, n] - 0.5)`` with each term
    dropped when the reference arm itself occupies that slot, so a duel
    featuring the reference against an equally strong rival costs zero.

    Raises:
        IndexError: If ``m == n`` or any index is out of range.
    """
    k = matrix.k
    if not 0 <= reference < k:
        raise IndexError(f"reference arm {reference} out of range for k={k}")
    if m == n:
        raise IndexError("a duel needs two distinct arms")
    cost = 0.0
    if m != reference:
        cost += delta(matrix, reference, m)
    if n != reference:
        cost += delta(matrix, reference, n)
    return cost
