"""Assignment policies: uniform random pairing and adaptive pairing.

The adaptive policy keeps a win-count matrix ``b`` (``b[i, j]`` = duels
arm ``i`` won against arm ``j``) and selects each pair in two phases:
confidence bounds prune the first arm to likely overall winners refined
by one round of posterior sampling, then a second posterior round picks
the challenger among arms not yet clearly beaten by the first.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log, sqrt

import numpy as np

from .errors import InvalidWinner, RangeError, ShapeError

# Default exploration constant; values at or below 0.5 void the
# confidence-bound guarantees, so construction rejects them.
ALPHA_EXPLORE = 0.6


@dataclass(frozen=True)
class ArmPair:
    """An ordered presentation of two distinct arms."""

    first: int
    second: int

    def __post_init__(self) -> None:
        if self.first == self.second:
            raise RangeError("a pair needs two distinct arms")

    def unordered(self) -> tuple[int, int]:
        """The pair as a sorted tuple, for keying pair-level tallies."""
        return (self.first, self.second) if self.first < self.second else (
            self.second,
            self.first,
        )


@dataclass
class DtsState:
    """Mutable belief state of the adaptive policy.

    Attributes:
        k: Number of arms.
        b: ``(k, k)`` int64 win counts, zero diagonal.
        t: Completed duels; always equals ``b.sum()``.
        alpha_explore: Width constant of the confidence bounds.
    """

    k: int
    b: np.ndarray
    t: int
    alpha_explore: float = ALPHA_EXPLORE

    def __post_init__(self) -> None:
        self.b = np.asarray(self.b, dtype=np.int64)
        if self.b.shape != (self.k, self.k):
            raise ShapeError(
                f"win counts must have shape ({self.k}, {self.k}), "
                f"got {self.b.shape}"
            )
        if self.k < 2:
            raise ShapeError("need at least two arms")
        if np.any(self.b < 0):
            raise RangeError("win counts cannot be negative")
        if np.any(np.diagonal(self.b) != 0):
            raise RangeError("an arm cannot win against itself")
        if self.t != int(self.b.sum()):
            raise RangeError(
                f"t={self.t} disagrees with the win-count total {int(self.b.sum())}"
            )
        if not self.alpha_explore > 0.5:
            raise RangeError(
                f"alpha_explore must exceed 0.5, got {self.alpha_explore}"
            )

    @classmethod
    def fresh(cls, k: int, alpha_explore: float = ALPHA_EXPLORE) -> "DtsState":
        """A state with no observations over ``k`` arms."""
        return cls(k=k, b=np.zeros((k, k), dtype=np.int64), t=0,
                   alpha_explore=alpha_explore)


def uniform_select(k: int, rng: np.random.Generator) -> ArmPair:
    """Draw an ordered pair of distinct arms uniformly at random.

    Every ordered pair has probability ``1 / (k * (k - 1))``, so each
    unordered pair is equally likely and both orderings are symmetric.

    Raises:
        RangeError: If ``k < 2``.
    """
    if k < 2:
        raise RangeError("need at least two arms")
    first = int(rng.integers(k))
    second = int(rng.integers(k - 1))
    if second >= first:
        second += 1
    return ArmPair(first=first, second=second)


def dts_bounds(state: DtsState, i: int, j: int) -> tuple[float, float]:
    """Confidence bounds on ``P[i, j]`` implied by the current counts.

    With ``n = b[i, j] + b[j, i]`` observations the bounds are
    ``b[i, j] / n  +/-  sqrt(alpha_explore * ln(t) / n)``; an unobserved
    pair is maximally uncertain and returns ``(1.0, 0.0)``.

    Raises:
        IndexError: If ``i == j`` or either index is out of range.
    """
    if not (0 <= i < state.k and 0 <= j < state.k):
        raise IndexError(f"arm index out of range for k={state.k}: ({i}, {j})")
    if i == j:
        raise IndexError("bounds are undefined for an arm against itself")
    n = int(state.b[i, j] + state.b[j, i])
    if n == 0:
        return (1.0, 0.0)
    p_hat = state.b[i, j] / n
    c = sqrt(state.alpha_explore * log(state.t) / n)
    return (float(p_hat + c), float(p_hat - c))


def dts_update(state: DtsState, pair: ArmPair, winner: int) -> DtsState:
    """Record a duel outcome in place and return the state.

    Raises:
        InvalidWinner: If ``winner`` is not one of the pair's arms.
    """
    if winner == pair.first:
        loser = pair.second
    elif winner == pair.second:
        loser = pair.first
    else:
        raise InvalidWinner(
            f"winner {winner} is neither arm {pair.first} nor {pair.second}"
        )
    state.b[winner, loser] += 1
    state.t += 1
    return state


def _bounds_matrices(
    b: np.ndarray, t: int, alpha_explore: float
) -> tuple[np.ndarray, np.ndarray]:
    """Upper and lower confidence matrices at ln-index ``t``.

    Entries with no observations get ``(1.0, 0.0)``; the diagonal always
    falls in that case and is masked out by the callers.
    """
    n = b + b.T
    seen = n > 0
    safe_n = np.where(seen, n, 1)
    p_hat = np.where(seen, b / safe_n, 0.5)
    c = np.sqrt(alpha_explore * np.log(t) / safe_n)
    upper = np.where(seen, p_hat + c, 1.0)
    lower = np.where(seen, p_hat - c, 0.0)
    return upper, lower


def _sample_theta(b: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One posterior draw per unordered pair, antisymmetric around 0.5.

    ``theta[i, j] ~ Beta(b[i, j] + 1, b[j, i] + 1)`` for ``i < j`` and
    ``theta[j, i] = 1 - theta[i, j]``; the diagonal stays at one half.
    """
    k = b.shape[0]
    iu = np.triu_indices(k, 1)
    draws = rng.beta(b[iu] + 1, b.T[iu] + 1)
    theta = np.full((k, k), 0.5)
    theta[iu] = draws
    theta.T[iu] = 1.0 - draws
    return theta


def _argmax_random_tie(
    values: np.ndarray, candidates: np.ndarray, rng: np.random.Generator
) -> int:
    """Index in ``candidates`` maximizing ``values``, ties broken uniformly."""
    vals = values[candidates]
    pool = candidates[vals == vals.max()]
    if pool.size == 1:
        return int(pool[0])
    return int(pool[rng.integers(pool.size)])


def dts_select(state: DtsState, rng: np.random.Generator) -> ArmPair:
    """Choose the next presentation under the adaptive policy.

    Phases, all computed at ln-index ``t + 1`` (the duel about to run):

    1. Upper confidence bounds give optimistic scores
       ``zeta[i] = #{j != i : upper[i, j] > 0.5} / (k - 1)``; the
       first-arm candidate set is the argmax of ``zeta``.
    2. A posterior draw ``theta`` over unordered pairs elects the first
       arm: among the candidates, the arm whose draws beat 0.5 against
       the most opponents, ties uniform.
    3. A second posterior draw against the first arm elects the
       challenger among arms whose lower bound against the first does
       not exceed 0.5; if no arm qualifies the challenger is uniform
       over the remaining arms.

    Returns:
        The ordered pair (first arm, challenger).
    """
    k = state.k
    upper, lower = _bounds_matrices(state.b, state.t + 1, state.alpha_explore)
    off_diagonal = ~np.eye(k, dtype=bool)
    zeta = ((upper > 0.5) & off_diagonal).sum(axis=1) / (k - 1)
    candidates = np.flatnonzero(zeta == zeta.max())

    theta = _sample_theta(state.b, rng)
    wins = ((theta > 0.5) & off_diagonal).sum(axis=1)
    first = _argmax_random_tie(wins, candidates, rng)

    others = np.flatnonzero(np.arange(k) != first)
    allowed = others[lower[others, first] <= 0.5]
    if allowed.size == 0:
        second = int(others[rng.integers(others.size)])
    else:
        theta_second = rng.beta(state.b[:, first] + 1, state.b[first, :] + 1)
        second = _argmax_random_tie(theta_second, allowed, rng)
    return ArmPair(first=first, second=second)
