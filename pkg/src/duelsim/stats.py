"""Two-cell goodness-of-fit testing and power planning for duel counts.

Each arm pair accumulates a 2-cell table (wins for the row arm, wins for
the column arm).  Under no preference both cells expect ``n / 2``, so the
Pearson statistic collapses to ``(w_ij - w_ji)^2 / n`` on one degree of
freedom.  Planning uses the matching noncentral chi-square power curve
with effect size ``w = 2 * |delta|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.special import gammainc, gammaincc, gammainccinv

from .errors import ConfigMismatch, DomainError, EmptyInput, RangeError

# Poisson-mixture truncation: stop once this much mixture mass is covered.
_SERIES_TAIL = 1e-12
_SERIES_MAX_TERMS = 100_000


@dataclass(frozen=True)
class PairTestResult:
    """Outcome of the two-cell test on one arm pair.

    Attributes:
        pair: Unordered arm pair the counts belong to, or ``None`` when the
            caller tested bare counts.
        n: Total duels observed for the pair.
        statistic: Pearson statistic ``(w_ij - w_ji)^2 / n`` (zero if n=0).
        p_value: Upper-tail probability on one degree of freedom.
        significant: Whether ``p_value`` fell below the test level.
    """

    pair: tuple[int, int] | None
    n: int
    statistic: float
    p_value: float
    significant: bool


@dataclass(frozen=True)
class PowerSpec:
    """Target for a sample-size computation.

    Attributes:
        effect_w: Cohen's w effect size, ``2 * |delta|``; must be positive.
        target_power: Desired detection probability.
        alpha: Test level.
        df: Degrees of freedom of the test.
    """

    effect_w: float
    target_power: float = 0.8
    alpha: float = 0.05
    df: int = 1

    def __post_init__(self) -> None:
        if not 0.0 < self.effect_w <= 1.0:
            raise DomainError(f"effect_w must be in (0, 1], got {self.effect_w}")
        if not 0.0 < self.target_power < 1.0:
            raise DomainError(
                f"target_power must be in (0, 1), got {self.target_power}"
            )
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.df < 1:
            raise DomainError(f"df must be >= 1, got {self.df}")


@dataclass(frozen=True)
class PowerSummary:
    """Detection rates aggregated over replications at one checkpoint."""

    per_pair: dict[tuple[int, int], float]
    mean_power: float
    replications: int


@dataclass(frozen=True)
class FprSummary:
    """False-positive rates aggregated over zero-effect replications.

    Attributes:
        per_pair: Significant tests divided by all tests, pooled over
            pairs and replications.
        family_wise: Fraction of replications with at least one
            significant pair.
        by_pair: Pooled rate broken out per pair.
        replications: Number of replications aggregated.
    """

    per_pair: float
    family_wise: float
    by_pair: dict[tuple[int, int], float]
    replications: int


def chi_square_sf(x: float, df: int) -> float:
    """Upper-tail probability of the central chi-square distribution.

    Args:
        x: Observed statistic, ``x >= 0``.
        df: Degrees of freedom, ``df >= 1``.

    Returns:
        ``P(X >= x)`` for ``X ~ chi-square(df)``.

    Raises:
        DomainError: If ``x`` is negative or ``df < 1``.
    """
    if x < 0:
        raise DomainError(f"statistic must be >= 0, got {x}")
    if df < 1:
        raise DomainError(f"df must be >= 1, got {df}")
    return float(gammaincc(df / 2.0, x / 2.0))


def chi_square_critical(alpha: float, df: int) -> float:
    """Statistic value whose upper-tail probability equals ``alpha``."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    if df < 1:
        raise DomainError(f"df must be >= 1, got {df}")
    return float(2.0 * gammainccinv(df / 2.0, alpha))


def pair_test(wins_ij: int, wins_ji: int, alpha: float = 0.05) -> PairTestResult:
    """Test whether one arm of a pair wins more often than the other.

    The statistic is the two-cell Pearson goodness-of-fit value against
    the fair split ``(n/2, n/2)``, without continuity correction.  With no
    observations the test abstains: p-value one, not significant.

    Args:
        wins_ij: Wins recorded for the first orientation.
        wins_ji: Wins recorded for the opposite orientation.
        alpha: Significance level compared against the p-value.

    Raises:
        RangeError: If either count is negative.
        DomainError: If ``alpha`` is outside ``(0, 1)``.
    """
    if wins_ij < 0 or wins_ji < 0:
        raise RangeError(f"win counts must be >= 0, got ({wins_ij}, {wins_ji})")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    n = wins_ij + wins_ji
    if n == 0:
        return PairTestResult(
            pair=None, n=0, statistic=0.0, p_value=1.0, significant=False
        )
    statistic = (wins_ij - wins_ji) ** 2 / n
    p_value = chi_square_sf(statistic, 1)
    return PairTestResult(
        pair=None,
        n=n,
        statistic=float(statistic),
        p_value=p_value,
        significant=bool(p_value < alpha),
    )


def pair_test_arrays(
    wins_ij: np.ndarray, wins_ji: np.ndarray, alpha: float = 0.05
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized twin of :func:`pair_test` for arrays of counts.

    Entries with zero total abstain exactly like the scalar version:
    statistic zero, p-value one, not significant.

    Returns:
        Arrays ``(statistic, p_value, significant)`` broadcast over the
        two count arrays.

    Raises:
        RangeError: If any count is negative.
        DomainError: If ``alpha`` is outside ``(0, 1)``.
    """
    wins_ij = np.asarray(wins_ij)
    wins_ji = np.asarray(wins_ji)
    if np.any(wins_ij < 0) or np.any(wins_ji < 0):
        raise RangeError("win counts must be >= 0")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    n = wins_ij + wins_ji
    seen = n > 0
    diff = wins_ij.astype(np.float64) - wins_ji
    statistic = np.where(seen, diff**2 / np.maximum(n, 1), 0.0)
    p_value = np.where(seen, gammaincc(0.5, statistic / 2.0), 1.0)
    return statistic, p_value, p_value < alpha


def cohens_w_from_delta(delta: float) -> float:
    """Convert a pairwise effect ``delta`` to Cohen's w, ``2 * |delta|``.

    Raises:
        DomainError: If ``|delta| > 0.5`` (not a valid win-probability shift).
    """
    if abs(delta) > 0.5:
        raise DomainError(f"|delta| must be <= 0.5, got {delta}")
    return 2.0 * abs(delta)


def noncentral_chi2_cdf(x: float, df: int, lam: float) -> float:
    """CDF of the noncentral chi-square distribution.

    Evaluated as the Poisson mixture of central CDFs,

        ``F(x; df, lam) = sum_j  Pois(j; lam/2) * F_central(x; df + 2j)``,

    truncated once the accumulated Poisson weight exceeds
    ``1 - 1e-12``.  With ``lam == 0`` this reduces to the central CDF.

    Args:
        x: Evaluation point, ``x >= 0``.
        df: Degrees of freedom, ``df >= 1``.
        lam: Noncentrality parameter, ``lam >= 0``.

    Raises:
        DomainError: If ``x`` or ``lam`` is negative, or ``df < 1``.
    """
    if x < 0:
        raise DomainError(f"x must be >= 0, got {x}")
    if lam < 0:
        raise DomainError(f"lambda must be >= 0, got {lam}")
    if df < 1:
        raise DomainError(f"df must be >= 1, got {df}")
    if x == 0.0:
        return 0.0
    half_lam = lam / 2.0
    weight = math.exp(-half_lam)
    covered = weight
    total = weight * float(gammainc(df / 2.0, x / 2.0))
    j = 0
    while covered < 1.0 - _SERIES_TAIL and j < _SERIES_MAX_TERMS:
        j += 1
        weight *= half_lam / j
        covered += weight
        total += weight * float(gammainc(df / 2.0 + j, x / 2.0))
    return min(total, 1.0)


def chi_square_power(
    effect_w: float, m: int, alpha: float = 0.05, df: int = 1
) -> float:
    """Detection probability with ``m`` observations at effect ``w``.

    Power is the upper tail of the noncentral chi-square with
    noncentrality ``m * w**2`` beyond the central critical value.
    """
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    crit = chi_square_critical(alpha, df)
    return 1.0 - noncentral_chi2_cdf(crit, df, m * effect_w**2)


def required_sample_size(spec: PowerSpec) -> int:
    """Smallest number of duels achieving ``target_power`` at effect ``w``.

    Searches the monotone power curve by doubling then bisection, so the
    returned ``m`` satisfies the target while ``m - 1`` does not.

    Raises:
        DomainError: If ``spec`` carries a non-positive effect
            (enforced by :class:`PowerSpec` itself).
    """
    hi = 1
    while chi_square_power(spec.effect_w, hi, spec.alpha, spec.df) < spec.target_power:
        hi *= 2
        if hi > 2**40:
            raise DomainError("target power unreachable; effect too small")
    lo = hi // 2
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if chi_square_power(spec.effect_w, mid, spec.alpha, spec.df) >= spec.target_power:
            hi = mid
        else:
            lo = mid
    return hi


def horizon_for_condition(m: int, n_pairs: int, multiplier: int) -> int:
    """Total duels for a condition: ``multiplier * m * n_pairs``.

    Args:
        m: Required per-pair sample size.
        n_pairs: Number of unordered arm pairs, ``k * (k - 1) / 2``.
        multiplier: Budget multiplier giving each pair that many
            multiples of ``m`` under an even split.

    Raises:
        RangeError: If any argument is below one.
    """
    if m < 1 or n_pairs < 1 or multiplier < 1:
        raise RangeError(
            f"all inputs must be >= 1, got m={m}, n_pairs={n_pairs}, "
            f"multiplier={multiplier}"
        )
    return m * n_pairs * multiplier


def _pairs_by_replication(
    per_replication: Sequence[Iterable[PairTestResult]],
) -> tuple[list[tuple[int, int]], list[Mapping[tuple[int, int], PairTestResult]]]:
    """Index test results by pair and check every replication covers the
    same pair set."""
    if len(per_replication) == 0:
        raise EmptyInput("no replications to aggregate")
    indexed: list[Mapping[tuple[int, int], PairTestResult]] = []
    for results in per_replication:
        by_pair: dict[tuple[int, int], PairTestResult] = {}
        for result in results:
            if result.pair is None:
                raise ConfigMismatch("aggregation needs pair-labelled results")
            by_pair[result.pair] = result
        indexed.append(by_pair)
    pairs = sorted(indexed[0])
    for by_pair in indexed[1:]:
        if sorted(by_pair) != pairs:
            raise ConfigMismatch("replications tested different pair sets")
    if not pairs:
        raise EmptyInput("replications contain no pair tests")
    return pairs, indexed


def aggregate_power(
    per_replication: Sequence[Iterable[PairTestResult]],
) -> PowerSummary:
    """Fraction of replications detecting each pair, and the pair mean.

    Args:
        per_replication: One collection of pair-labelled test results per
            replication, all covering the same pairs.

    Raises:
        EmptyInput: If there are no replications or no pairs.
        ConfigMismatch: If replications tested different pair sets or a
            result lacks its pair label.
    """
    pairs, indexed = _pairs_by_replication(per_replication)
    reps = len(indexed)
    per_pair = {
        pair: sum(by_pair[pair].significant for by_pair in indexed) / reps
        for pair in pairs
    }
    mean_power = sum(per_pair.values()) / len(pairs)
    return PowerSummary(per_pair=per_pair, mean_power=mean_power, replications=reps)


def aggregate_fpr(
    per_replication: Sequence[Iterable[PairTestResult]],
) -> FprSummary:
    """False-positive rates over replications run with no true effects.

    The pooled rate treats every (replication, pair) test as one trial;
    the family-wise rate asks whether any pair fired within a
    replication.

    Raises:
        EmptyInput: If there are no replications or no pairs.
        ConfigMismatch: If replications tested different pair sets.
    """
    pairs, indexed = _pairs_by_replication(per_replication)
    reps = len(indexed)
    by_pair = {
        pair: sum(by_pair[pair].significant for by_pair in indexed) / reps
        for pair in pairs
    }
    pooled = sum(by_pair.values()) / len(pairs)
    family = (
        sum(any(by_pair[p].significant for p in pairs) for by_pair in indexed) / reps
    )
    return FprSummary(
        per_pair=pooled, family_wise=family, by_pair=by_pair, replications=reps
    )
