"""Preference matrices derived from ranker comparisons.

A ranker matrix file is a comma-separated square grid of win
probabilities, optionally preceded by one header line.  Off-diagonal
pairs may disagree with the complement rule by a small rounding slack;
the loader repairs them to the midpoint so downstream code always sees
an exact matrix.  Experiment conditions are built by sampling small arm
subsets from the loaded matrix, filtered on whether the subset carries a
Condorcet winner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import (
    AttemptsExhausted,
    ComplementViolation,
    ModeMismatch,
    ParseError,
    RangeError,
    SizeMismatch,
)
from .preferences import PreferenceMatrix, analyze_winners, new_preference_matrix
from .stats import PowerSpec, horizon_for_condition, required_sample_size

# Complement slack accepted in files; larger gaps are data errors, not
# rounding, and loading fails instead of repairing.
REPAIR_TOL = 0.01

MODE_CONDORCET = "condorcet"
MODE_NON_CONDORCET = "non_condorcet"
MODE_ANY = "any"
MODES = (MODE_CONDORCET, MODE_NON_CONDORCET, MODE_ANY)

# Effect size the duel budget is planned around: the smallest effect a
# condition is expected to resolve.
PLANNING_EFFECT_W = 0.1


@dataclass(frozen=True)
class RankerMatrixFile:
    """A ranker matrix source on disk.

    Attributes:
        path: Location of the CSV grid.
        expected_size: Declared number of rankers, checked after parsing,
            or ``None`` to accept any size.
    """

    path: str
    expected_size: int | None = None


@dataclass(frozen=True)
class SubmatrixSpec:
    """How to pick an arm subset from a loaded matrix.

    Attributes:
        size: Number of arms to select.
        mode: ``"condorcet"`` requires the subset to have a Condorcet
            winner, ``"non_condorcet"`` requires it not to, ``"any"``
            accepts every subset.
        indices: Explicit arm indices to use instead of sampling; the
            mode is then validated rather than searched for.
    """

    size: int
    mode: str = MODE_ANY
    indices: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.size < 2:
            raise RangeError(f"subset size must be >= 2, got {self.size}")
        if self.mode not in MODES:
            raise RangeError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if self.indices is not None:
            if len(self.indices) != self.size:
                raise SizeMismatch(
                    f"{len(self.indices)} indices given for subset size {self.size}"
                )
            if len(set(self.indices)) != len(self.indices):
                raise RangeError(f"indices must be distinct, got {self.indices}")


@dataclass(frozen=True)
class LtrConditionPlan:
    """Duel budget and effect layout for one ranker-derived condition.

    Attributes:
        size: Number of arms.
        multiplier: Budget multiplier over the planning sample size.
        participants_per_pair: Duels per pair needed for 80% power at
            the planning effect, under an even split.
        horizon: Total duels: ``multiplier * pairs * participants_per_pair``.
        pair_effects: Cohen's w of every unordered pair.
        min_effect_pair: Pair carrying the smallest effect.
        min_effect_w: That smallest effect.
        zero_effect: True when every pair has w = 0, i.e. the condition
            behaves like a pure null and can only measure false positives.
        has_condorcet: Whether the subset has a Condorcet winner.
        reference_arm: Regret baseline arm of the subset.
    """

    size: int
    multiplier: int
    participants_per_pair: int
    horizon: int
    pair_effects: dict[tuple[int, int], float]
    min_effect_pair: tuple[int, int]
    min_effect_w: float
    zero_effect: bool
    has_condorcet: bool
    reference_arm: int


@lru_cache(maxsize=None)
def _planning_sample_size() -> int:
    return required_sample_size(PowerSpec(effect_w=PLANNING_EFFECT_W))


def bundled_matrix_path() -> Path:
    """Path of the example ranker matrix shipped with the package."""
    return Path(resources.files("duelsim") / "data" / "example_rankers.csv")


def load_matrix(source: RankerMatrixFile | str | Path) -> PreferenceMatrix:
    """Parse, repair, and validate a ranker matrix file.

    An optional single header line is detected by its first cell not
    parsing as a number.  Off-diagonal pairs whose probabilities sum to
    one within ``REPAIR_TOL`` are symmetrized to the midpoint, e.g.
    entries ``(0.701, 0.300)`` become ``(0.7005, 0.2995)``; the diagonal
    is overwritten with one half.

    Args:
        source: A :class:`RankerMatrixFile`, or a bare path accepted
            with no size expectation.

    Raises:
        ParseError: On empty input, non-numeric cells, ragged rows, or a
            non-square grid.
        SizeMismatch: If the grid size differs from ``expected_size``.
        RangeError: If any entry falls outside ``[0, 1]``.
        ComplementViolation: If a pair disagrees by more than the slack.
    """
    file = (
        source
        if isinstance(source, RankerMatrixFile)
        else RankerMatrixFile(path=str(source))
    )
    lines = [line for line in Path(file.path).read_text().splitlines() if line.strip()]
    if not lines:
        raise ParseError(f"{file.path}: no rows")

    def split(line: str) -> list[str]:
        return [cell.strip() for cell in line.split(",")]

    start = 0
    try:
        float(split(lines[0])[0])
    except ValueError:
        start = 1
    if start == len(lines):
        raise ParseError(f"{file.path}: header but no data rows")
    rows: list[list[float]] = []
    for line_no, line in enumerate(lines[start:], start=start + 1):
        cells = split(line)
        try:
            row = [float(cell) for cell in cells]
        except ValueError:
            raise ParseError(f"{file.path}: non-numeric cell on line {line_no}")
        if not all(math.isfinite(v) for v in row):
            raise ParseError(f"{file.path}: non-finite value on line {line_no}")
        rows.append(row)
    k = len(rows)
    if any(len(row) != len(rows[0]) for row in rows):
        raise ParseError(f"{file.path}: ragged rows")
    if len(rows[0]) != k:
        raise ParseError(
            f"{file.path}: expected a square grid, got {k} rows of {len(rows[0])}"
        )
    if file.expected_size is not None and k != file.expected_size:
        raise SizeMismatch(
            f"{file.path}: declared {file.expected_size} rankers, file has {k}"
        )
    p = np.array(rows, dtype=np.float64)
    if np.any(p < 0.0) or np.any(p > 1.0):
        bad = np.argwhere((p < 0.0) | (p > 1.0))[0]
        raise RangeError(
            f"{file.path}: entry ({bad[0]}, {bad[1]}) = {p[bad[0], bad[1]]} "
            f"is outside [0, 1]"
        )
    iu = np.triu_indices(k, 1)
    gap = np.abs(p[iu] + p.T[iu] - 1.0)
    if np.any(gap > REPAIR_TOL):
        at = int(np.argmax(gap > REPAIR_TOL))
        i, j = int(iu[0][at]), int(iu[1][at])
        raise ComplementViolation(
            f"{file.path}: entries ({i}, {j}) and ({j}, {i}) sum to "
            f"{p[i, j] + p[j, i]:.6f}, beyond slack {REPAIR_TOL}"
        )
    mid = (p[iu] + 1.0 - p.T[iu]) / 2.0
    p[iu] = mid
    p.T[iu] = 1.0 - mid
    np.fill_diagonal(p, 0.5)
    return new_preference_matrix(p)


def _matches_mode(sub: PreferenceMatrix, mode: str) -> bool:
    if mode == MODE_ANY:
        return True
    has = analyze_winners(sub).condorcet_winner is not None
    return has if mode == MODE_CONDORCET else not has


def sample_submatrix(
    matrix: PreferenceMatrix,
    spec: SubmatrixSpec,
    rng: np.random.Generator,
    max_attempts: int = 10_000,
) -> tuple[tuple[int, ...], PreferenceMatrix]:
    """Pick an arm subset satisfying ``spec`` and return its sub-matrix.

    Without explicit indices, subsets are drawn uniformly over all
    size-``spec.size`` index sets and rejected until the mode holds, so
    accepted subsets are uniform over the qualifying ones.  Explicit
    indices skip the random draw entirely and are only validated.

    Returns:
        The selected indices in ascending order and the restricted,
        revalidated preference matrix.

    Raises:
        SizeMismatch: If the subset size exceeds the matrix size.
        IndexError: If explicit indices fall outside the matrix.
        ModeMismatch: If explicit indices contradict the mode.
        AttemptsExhausted: If no qualifying subset appears in budget.
    """
    if spec.size > matrix.k:
        raise SizeMismatch(
            f"cannot pick {spec.size} arms from a {matrix.k}-ranker matrix"
        )
    if spec.indices is not None:
        for index in spec.indices:
            if not 0 <= index < matrix.k:
                raise IndexError(
                    f"index {index} out of range for {matrix.k} rankers"
                )
        indices = tuple(sorted(spec.indices))
        sub = matrix.restrict(indices)
        if not _matches_mode(sub, spec.mode):
            raise ModeMismatch(
                f"indices {indices} do not form a {spec.mode!r} subset"
            )
        return indices, sub
    for _ in range(max_attempts):
        drawn = np.sort(rng.choice(matrix.k, size=spec.size, replace=False))
        indices = tuple(int(i) for i in drawn)
        sub = matrix.restrict(indices)
        if _matches_mode(sub, spec.mode):
            return indices, sub
    raise AttemptsExhausted(
        f"no {spec.mode!r} subset of size {spec.size} found in "
        f"{max_attempts} attempts"
    )


def ltr_condition(matrix: PreferenceMatrix, multiplier: int) -> LtrConditionPlan:
    """Plan the duel budget for a ranker-derived arm subset.

    The horizon gives every pair ``multiplier`` times the sample size
    needed to resolve the planning effect ``w = 0.1`` at 80% power under
    an even split, regardless of the subset's actual effects; the plan
    reports those effects so callers can see what the budget buys.

    Args:
        matrix: The (sub-)matrix the condition will run on.
        multiplier: Budget multiplier, between 1 and 10.

    Raises:
        RangeError: If ``multiplier`` is outside ``[1, 10]``.
    """
    if not 1 <= multiplier <= 10:
        raise RangeError(f"multiplier must be in [1, 10], got {multiplier}")
    size = matrix.k
    m = _planning_sample_size()
    n_pairs = size * (size - 1) // 2
    horizon = horizon_for_condition(m, n_pairs, multiplier)
    effects = {
        (i, j): 2.0 * abs(float(matrix.p[i, j]) - 0.5)
        for i in range(size)
        for j in range(i + 1, size)
    }
    min_pair = min(effects, key=lambda pair: (effects[pair], pair))
    analysis = analyze_winners(matrix)
    return LtrConditionPlan(
        size=size,
        multiplier=multiplier,
        participants_per_pair=m,
        horizon=horizon,
        pair_effects=effects,
        min_effect_pair=min_pair,
        min_effect_w=effects[min_pair],
        zero_effect=max(effects.values()) == 0.0,
        has_condorcet=analysis.condorcet_winner is not None,
        reference_arm=analysis.reference_arm,
    )
