"""Experiment conditions, replications, and cross-replication aggregates.

A condition fixes a policy, an environment (synthetic effect grid or a
ranker-derived subset), a duel budget, and checkpoint times.  Each
replication derives two private random streams from the condition id and
its replication index, one for building the preference matrix and one
for simulating duels, so results are reproducible to the byte no matter
how replications are scheduled across worker processes.
"""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .errors import ConfigMismatch, RangeError
from .ltr import (
    MODE_ANY,
    MODES,
    SubmatrixSpec,
    _planning_sample_size,
    load_matrix,
    sample_submatrix,
)
from .policies import ALPHA_EXPLORE
from .preferences import (
    PreferenceMatrix,
    analyze_winners,
    generate_effect_matrix,
    new_preference_matrix,
    step_strong_regret,
    zero_effect_matrix,
)
from .stats import (
    PairTestResult,
    PowerSpec,
    horizon_for_condition,
    pair_test,
    pair_test_arrays,
    required_sample_size,
)

POLICY_UNIFORM = "uniform"
POLICY_DTS = "dts"
POLICIES = (POLICY_UNIFORM, POLICY_DTS)

DEFAULT_BASE_SEED = 20240229
DEFAULT_REPLICATIONS = 500
DEFAULT_ARMS = (3, 5)
DEFAULT_EFFECTS_W = (0.0, 0.1, 0.3, 0.5)
DEFAULT_HORIZON_MULTIPLIER = 10
DEFAULT_CHECKPOINT_COUNT = 20

# Zero-effect conditions have no sample-size requirement of their own;
# they borrow the budget of the middle effect so false-positive rates
# are measured at a realistic horizon.
ZERO_EFFECT_ANCHOR_W = 0.3

# Environment variable consulted when no worker count is passed in.
WORKERS_ENV_VAR = "DUELSIM_WORKERS"


@dataclass(frozen=True)
class SyntheticEnvironment:
    """Arms with equal-magnitude random-orientation effects.

    Attributes:
        k: Number of arms.
        effect_w: Cohen's w shared by every pair (``2 * |delta|``); zero
            makes every duel a fair coin flip.
        require_condorcet: Regenerate matrices until a Condorcet winner
            exists (ignored at zero effect, where none can exist).
    """

    k: int
    effect_w: float
    require_condorcet: bool = True

    def __post_init__(self) -> None:
        if self.k < 2:
            raise RangeError(f"need at least two arms, got {self.k}")
        if not 0.0 <= self.effect_w <= 1.0:
            raise RangeError(f"effect_w must be in [0, 1], got {self.effect_w}")

    @property
    def delta(self) -> float:
        """Per-pair win-probability shift, ``effect_w / 2``."""
        return self.effect_w / 2.0

    @property
    def label(self) -> str:
        return f"k{self.k}-w{self.effect_w:g}"


@dataclass(frozen=True)
class LtrEnvironment:
    """Arm subsets drawn from a ranker preference matrix.

    Attributes:
        matrix_path: CSV file the base matrix is loaded from.
        size: Arms per subset.
        mode: Condorcet filter applied when sampling subsets.
        indices: Fixed arm indices; when set, every replication uses the
            same subset and only the duels vary.
        multiplier: Duel-budget multiplier, 1 to 10.
    """

    matrix_path: str
    size: int
    mode: str = MODE_ANY
    indices: tuple[int, ...] | None = None
    multiplier: int = 1

    def __post_init__(self) -> None:
        if self.size < 2:
            raise RangeError(f"subset size must be >= 2, got {self.size}")
        if self.mode not in MODES:
            raise RangeError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if not 1 <= self.multiplier <= 10:
            raise RangeError(f"multiplier must be in [1, 10], got {self.multiplier}")
        if self.indices is not None:
            object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))

    @property
    def k(self) -> int:
        return self.size

    @property
    def label(self) -> str:
        parts = [f"ltr{self.size}", self.mode]
        if self.indices is not None:
            parts.append("i" + ".".join(str(i) for i in self.indices))
        parts.append(f"x{self.multiplier}")
        return "-".join(parts)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one condition.

    Attributes:
        policy: ``"uniform"`` or ``"dts"``.
        environment: Synthetic grid cell or ranker-derived subset.
        horizon: Total duels per replication.
        replications: Number of independent replications.
        checkpoints: Ascending 1-based duel counts at which metrics are
            recorded; the last entry must equal the horizon.
        base_seed: Root seed shared by the whole experiment.
        alpha_explore: Confidence-bound constant of the adaptive policy.
        significance_alpha: Level of the per-pair tests.
        horizon_multiplier: Budget multiplier the horizon was derived
            with; recorded so reports and manifests can state the rule
            behind the duel count.
    """

    policy: str
    environment: SyntheticEnvironment | LtrEnvironment
    horizon: int
    replications: int
    checkpoints: tuple[int, ...]
    base_seed: int = DEFAULT_BASE_SEED
    alpha_explore: float = ALPHA_EXPLORE
    significance_alpha: float = 0.05
    horizon_multiplier: int = DEFAULT_HORIZON_MULTIPLIER

    def __post_init__(self) -> None:
        if self.policy not in POLICIES:
            raise RangeError(
                f"unknown policy {self.policy!r}, expected one of {POLICIES}"
            )
        if self.horizon < 1:
            raise RangeError(f"horizon must be >= 1, got {self.horizon}")
        if self.replications < 1:
            raise RangeError(
                f"replications must be >= 1, got {self.replications}"
            )
        object.__setattr__(
            self, "checkpoints", tuple(int(c) for c in self.checkpoints)
        )
        cps = self.checkpoints
        if len(cps) == 0:
            raise RangeError("need at least one checkpoint")
        if any(b <= a for a, b in zip(cps, cps[1:])):
            raise RangeError(f"checkpoints must be strictly increasing: {cps}")
        if cps[0] < 1 or cps[-1] != self.horizon:
            raise RangeError(
                f"checkpoints must lie in [1, horizon] and end at the "
                f"horizon {self.horizon}: {cps}"
            )
        if self.base_seed < 0:
            raise RangeError(f"base_seed must be >= 0, got {self.base_seed}")
        if not self.alpha_explore > 0.5:
            raise RangeError(
                f"alpha_explore must exceed 0.5, got {self.alpha_explore}"
            )
        if not 0.0 < self.significance_alpha < 1.0:
            raise RangeError(
                f"significance_alpha must be in (0, 1), got "
                f"{self.significance_alpha}"
            )
        if self.horizon_multiplier < 1:
            raise RangeError(
                f"horizon_multiplier must be >= 1, got {self.horizon_multiplier}"
            )
        if (
            isinstance(self.environment, LtrEnvironment)
            and self.horizon_multiplier != self.environment.multiplier
        ):
            raise ConfigMismatch(
                f"horizon_multiplier {self.horizon_multiplier} disagrees with "
                f"the environment multiplier {self.environment.multiplier}"
            )

    @property
    def k(self) -> int:
        return self.environment.k

    @property
    def condition_id(self) -> str:
        """Stable identifier used for seeding and output file names."""
        return f"{self.policy}-{self.environment.label}"

    @property
    def zero_effect(self) -> bool:
        return (
            isinstance(self.environment, SyntheticEnvironment)
            and self.environment.effect_w == 0.0
        )

    @property
    def effect_w(self) -> float | None:
        """Design effect size, or ``None`` for ranker-derived conditions."""
        if isinstance(self.environment, SyntheticEnvironment):
            return self.environment.effect_w
        return None


@dataclass(frozen=True)
class CheckpointMetrics:
    """Metrics of one replication frozen at one checkpoint.

    Attributes:
        t: Completed duels at this checkpoint.
        pair_counts: ``(wins_ij, wins_ji)`` per unordered pair ``(i, j)``.
        pair_tests: Two-cell test of each pair's counts.
        cum_strong_regret: Regret accumulated over the first ``t`` duels.
        condorcet_assigned: Duels among the first ``t`` that included the
            Condorcet winner; zero when the matrix has none.
    """

    t: int
    pair_counts: dict[tuple[int, int], tuple[int, int]]
    pair_tests: dict[tuple[int, int], PairTestResult]
    cum_strong_regret: float
    condorcet_assigned: int


@dataclass(frozen=True)
class AggregateReport:
    """Cross-replication summary of one condition.

    Array shapes use R = replications, C = checkpoints, P = pairs.
    ``condorcet_prop`` entries are NaN for replications whose matrix has
    no Condorcet winner (always the case at zero effect).

    Attributes:
        significant: ``(R, C, P)`` test outcomes.
        cum_regret: ``(R, C)`` cumulative strong regret.
        condorcet_prop: ``(R, C)`` share of duels including the winner.
        pair_power: ``(C, P)`` detection rate per pair.
        mean_power: ``(C,)`` pair-averaged detection rate.
        mean_cum_regret: ``(C,)`` replication-averaged regret.
        condorcet_prop_mean: ``(C,)`` mean winner share over the
            replications where it is defined, NaN otherwise.
        per_pair_fpr: Pooled false-positive rate at the final checkpoint
            (zero-effect conditions only, else ``None``).
        family_fpr: Fraction of replications with any false positive at
            the final checkpoint (zero-effect only, else ``None``).
    """

    condition_id: str
    policy: str
    k: int
    effect_w: float | None
    horizon: int
    replications: int
    checkpoints: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]
    significant: np.ndarray
    cum_regret: np.ndarray
    condorcet_prop: np.ndarray
    pair_power: np.ndarray
    mean_power: np.ndarray
    mean_cum_regret: np.ndarray
    condorcet_prop_mean: np.ndarray
    per_pair_fpr: float | None
    family_fpr: float | None

    def first_checkpoint_at_power(self, threshold: float = 0.8) -> int | None:
        """Earliest checkpoint whose mean power reaches ``threshold``."""
        reached = np.flatnonzero(self.mean_power >= threshold)
        if reached.size == 0:
            return None
        return int(self.checkpoints[reached[0]])

    def regret_quantiles(
        self, qs: tuple[float, ...] = (0.25, 0.5, 0.75)
    ) -> np.ndarray:
        """Cumulative-regret quantile curves, shape ``(len(qs), C)``."""
        return np.quantile(self.cum_regret, qs, axis=0)

    def fpr_by_pair(self) -> dict[tuple[int, int], float] | None:
        """Final-checkpoint false-positive rate per pair (zero effect)."""
        if self.per_pair_fpr is None:
            return None
        final = self.significant[:, -1, :]
        return {
            pair: float(final[:, idx].mean()) for idx, pair in enumerate(self.pairs)
        }


def default_checkpoints(horizon: int, count: int = 20) -> tuple[int, ...]:
    """Evenly spaced 1-based checkpoint times ending at the horizon.

    Fractional positions are rounded, clamped to at least one, and
    deduplicated, so short horizons simply yield fewer checkpoints.

    Raises:
        RangeError: If ``horizon`` or ``count`` is below one.
    """
    if horizon < 1:
        raise RangeError(f"horizon must be >= 1, got {horizon}")
    if count < 1:
        raise RangeError(f"count must be >= 1, got {count}")
    points = sorted({max(1, round(i * horizon / count)) for i in range(1, count + 1)})
    return tuple(int(p) for p in points)


def _condition_tag(condition_id: str) -> int:
    digest = hashlib.sha256(condition_id.encode("utf-8")).digest()
    return int.from_bytes(digest[:16], "big")


def replication_rngs(
    config: ExperimentConfig, replication_index: int
) -> tuple[np.random.Generator, np.random.Generator]:
    """Environment and simulation generators for one replication.

    Both derive from ``(base_seed, condition id, replication index)``,
    and the two are spawned children of that sequence, so consuming a
    variable number of draws while building the matrix never shifts the
    duel stream.
    """
    if replication_index < 0:
        raise RangeError(
            f"replication index must be >= 0, got {replication_index}"
        )
    seq = np.random.SeedSequence(
        [config.base_seed, _condition_tag(config.condition_id), replication_index]
    )
    env_seq, sim_seq = seq.spawn(2)
    return np.random.default_rng(env_seq), np.random.default_rng(sim_seq)


def realize_matrix(
    config: ExperimentConfig,
    env_rng: np.random.Generator,
    base: PreferenceMatrix | None = None,
) -> PreferenceMatrix:
    """Build the preference matrix one replication runs on.

    Synthetic environments draw a fresh orientation (or the fixed
    zero-effect matrix); ranker environments restrict the base matrix to
    a sampled or explicitly fixed subset.
    """
    env = config.environment
    if isinstance(env, SyntheticEnvironment):
        if env.effect_w == 0.0:
            return zero_effect_matrix(env.k)
        return generate_effect_matrix(
            env.k, env.delta, env_rng, require_condorcet=env.require_condorcet
        )
    if base is None:
        base = load_matrix(env.matrix_path)
    spec = SubmatrixSpec(size=env.size, mode=env.mode, indices=env.indices)
    _, sub = sample_submatrix(base, spec, env_rng)
    return sub


def _uniform_snapshots(
    p: np.ndarray,
    horizon: int,
    checkpoints: tuple[int, ...],
    rng: np.random.Generator,
) -> np.ndarray:
    """Simulate uniform assignment and snapshot win counts.

    Pair draws match :func:`duelsim.policies.uniform_select`: first arm
    uniform, second uniform over the rest, outcomes Bernoulli from the
    matrix entry of the ordered pair.
    """
    k = p.shape[0]
    firsts = rng.integers(0, k, size=horizon)
    seconds = rng.integers(0, k - 1, size=horizon)
    seconds = np.where(seconds >= firsts, seconds + 1, seconds)
    first_wins = rng.random(horizon) < p[firsts, seconds]
    winners = np.where(first_wins, firsts, seconds)
    losers = np.where(first_wins, seconds, firsts)
    flat = winners * k + losers
    out = np.zeros((len(checkpoints), k, k), dtype=np.int64)
    running = np.zeros(k * k, dtype=np.int64)
    start = 0
    for idx, t in enumerate(checkpoints):
        running += np.bincount(flat[start:t], minlength=k * k)
        out[idx] = running.reshape(k, k)
        start = t
    return out


def _policy_snapshots(
    config: ExperimentConfig, matrix: PreferenceMatrix, sim_rng: np.random.Generator
) -> np.ndarray:
    """Win-count snapshots ``(C, k, k)`` for one simulated replication."""
    if config.policy == POLICY_UNIFORM:
        return _uniform_snapshots(
            matrix.p, config.horizon, config.checkpoints, sim_rng
        )
    seed = int(sim_rng.integers(0, 2**31 - 1))
    return _kernels.dts_replication(
        np.array(matrix.p, dtype=np.float64),
        config.horizon,
        np.asarray(config.checkpoints, dtype=np.int64),
        config.alpha_explore,
        seed,
    )


def _pair_axes(k: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(k, 1)


def _derive_rep_metrics(
    config: ExperimentConfig, matrix: PreferenceMatrix, snapshots: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-replication metric arrays from win-count snapshots.

    Returns:
        ``(significant (C, P) bool, cum_regret (C,), condorcet_prop (C,))``
        with NaN proportions when the matrix has no Condorcet winner.
    """
    rows, cols = _pair_axes(matrix.k)
    wins_ij = snapshots[:, rows, cols]
    wins_ji = snapshots[:, cols, rows]
    _, _, significant = pair_test_arrays(
        wins_ij, wins_ji, config.significance_alpha
    )
    analysis = analyze_winners(matrix)
    ref = analysis.reference_arm
    weights = np.array(
        [
            step_strong_regret(matrix, ref, int(i), int(j))
            for i, j in zip(rows, cols)
        ]
    )
    totals = (wins_ij + wins_ji).astype(np.float64)
    cum_regret = totals @ weights
    if analysis.condorcet_winner is None:
        prop = np.full(len(config.checkpoints), np.nan)
    else:
        winner = analysis.condorcet_winner
        mask = (rows == winner) | (cols == winner)
        prop = totals[:, mask].sum(axis=1) / np.asarray(
            config.checkpoints, dtype=np.float64
        )
    return significant, cum_regret, prop


def run_replication(
    config: ExperimentConfig,
    matrix: PreferenceMatrix | None = None,
    replication_index: int = 0,
) -> list[CheckpointMetrics]:
    """Run one replication and report metrics at every checkpoint.

    Args:
        config: The condition to run.
        matrix: Preference matrix to use instead of realizing one from
            the environment; the simulation stream is unchanged either
            way, so passing the matrix a replication would have built
            reproduces it exactly.
        replication_index: Which replication's streams to use.

    Raises:
        ConfigMismatch: If an explicit matrix does not match the
            environment's arm count.
    """
    if matrix is not None and matrix.k != config.environment.k:
        raise ConfigMismatch(
            f"matrix has {matrix.k} arms, environment expects "
            f"{config.environment.k}"
        )
    env_rng, sim_rng = replication_rngs(config, replication_index)
    if matrix is None:
        matrix = realize_matrix(config, env_rng)
    snapshots = _policy_snapshots(config, matrix, sim_rng)
    rows, cols = _pair_axes(matrix.k)
    pairs = [(int(i), int(j)) for i, j in zip(rows, cols)]
    analysis = analyze_winners(matrix)
    ref = analysis.reference_arm
    weights = {
        pair: step_strong_regret(matrix, ref, pair[0], pair[1]) for pair in pairs
    }
    metrics = []
    for idx, t in enumerate(config.checkpoints):
        snap = snapshots[idx]
        counts = {(i, j): (int(snap[i, j]), int(snap[j, i])) for i, j in pairs}
        tests = {
            pair: replace(
                pair_test(*counts[pair], alpha=config.significance_alpha),
                pair=pair,
            )
            for pair in pairs
        }
        regret = sum(sum(counts[pair]) * weights[pair] for pair in pairs)
        if analysis.condorcet_winner is None:
            assigned = 0
        else:
            winner = analysis.condorcet_winner
            assigned = sum(
                sum(counts[pair]) for pair in pairs if winner in pair
            )
        metrics.append(
            CheckpointMetrics(
                t=t,
                pair_counts=counts,
                pair_tests=tests,
                cum_strong_regret=float(regret),
                condorcet_assigned=assigned,
            )
        )
    return metrics


def _rep_chunk(
    config: ExperimentConfig,
    start: int,
    stop: int,
    base_payload: np.ndarray | None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Metric arrays for replications ``start..stop-1`` (worker entry)."""
    base = (
        new_preference_matrix(base_payload) if base_payload is not None else None
    )
    sig_parts = []
    regret_parts = []
    prop_parts = []
    for rep in range(start, stop):
        env_rng, sim_rng = replication_rngs(config, rep)
        matrix = realize_matrix(config, env_rng, base)
        snapshots = _policy_snapshots(config, matrix, sim_rng)
        sig, regret, prop = _derive_rep_metrics(config, matrix, snapshots)
        sig_parts.append(sig)
        regret_parts.append(regret)
        prop_parts.append(prop)
    return (
        np.stack(sig_parts),
        np.stack(regret_parts),
        np.stack(prop_parts),
    )


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        env_value = os.environ.get(WORKERS_ENV_VAR, "").strip()
        workers = int(env_value) if env_value else 1
    if workers < 1:
        raise RangeError(f"worker count must be >= 1, got {workers}")
    return workers


def run_condition(
    config: ExperimentConfig,
    base_matrix: PreferenceMatrix | None = None,
    workers: int | None = None,
) -> AggregateReport:
    """Run all replications of a condition and aggregate the metrics.

    Replications may be split over worker processes (``workers``
    argument, else the ``DUELSIM_WORKERS`` variable, else one); chunks
    are merged back in replication order, so the aggregate is identical
    for every worker count.

    Args:
        config: The condition to run.
        base_matrix: Pre-loaded ranker matrix, to avoid re-reading the
            file for each of several conditions.
        workers: Process count override.

    Raises:
        ConfigMismatch: If a base matrix is passed for a synthetic
            environment.
    """
    workers = _resolve_workers(workers)
    env = config.environment
    if isinstance(env, SyntheticEnvironment):
        if base_matrix is not None:
            raise ConfigMismatch("synthetic conditions do not take a base matrix")
        payload = None
    else:
        if base_matrix is None:
            base_matrix = load_matrix(env.matrix_path)
        payload = np.asarray(base_matrix.p)
    reps = config.replications
    n_chunks = min(workers, reps)
    if n_chunks <= 1:
        parts = [_rep_chunk(config, 0, reps, payload)]
    else:
        bounds = []
        step, extra = divmod(reps, n_chunks)
        lo = 0
        for i in range(n_chunks):
            hi = lo + step + (1 if i < extra else 0)
            bounds.append((lo, hi))
            lo = hi
        with ProcessPoolExecutor(max_workers=n_chunks) as pool:
            futures = [
                pool.submit(_rep_chunk, config, lo, hi, payload)
                for lo, hi in bounds
            ]
            parts = [future.result() for future in futures]
    significant = np.concatenate([part[0] for part in parts])
    cum_regret = np.concatenate([part[1] for part in parts])
    condorcet_prop = np.concatenate([part[2] for part in parts])

    pair_power = significant.mean(axis=0)
    mean_power = pair_power.mean(axis=1)
    mean_cum_regret = cum_regret.mean(axis=0)
    defined = ~np.isnan(condorcet_prop)
    counts = defined.sum(axis=0)
    sums = np.where(defined, condorcet_prop, 0.0).sum(axis=0)
    condorcet_prop_mean = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    if config.zero_effect:
        final = significant[:, -1, :]
        per_pair_fpr = float(final.mean())
        family_fpr = float(final.any(axis=1).mean())
    else:
        per_pair_fpr = None
        family_fpr = None
    rows, cols = _pair_axes(config.k)
    return AggregateReport(
        condition_id=config.condition_id,
        policy=config.policy,
        k=config.k,
        effect_w=config.effect_w,
        horizon=config.horizon,
        replications=reps,
        checkpoints=config.checkpoints,
        pairs=tuple((int(i), int(j)) for i, j in zip(rows, cols)),
        significant=significant,
        cum_regret=cum_regret,
        condorcet_prop=condorcet_prop,
        pair_power=pair_power,
        mean_power=mean_power,
        mean_cum_regret=mean_cum_regret,
        condorcet_prop_mean=condorcet_prop_mean,
        per_pair_fpr=per_pair_fpr,
        family_fpr=family_fpr,
    )


def build_condition_grid(
    base_seed: int = DEFAULT_BASE_SEED,
    replications: int = DEFAULT_REPLICATIONS,
    arms: tuple[int, ...] = DEFAULT_ARMS,
    effects_w: tuple[float, ...] = DEFAULT_EFFECTS_W,
    policies: tuple[str, ...] = POLICIES,
    horizon_multiplier: int = DEFAULT_HORIZON_MULTIPLIER,
    checkpoint_count: int = DEFAULT_CHECKPOINT_COUNT,
    alpha_explore: float = ALPHA_EXPLORE,
    significance_alpha: float = 0.05,
) -> list[ExperimentConfig]:
    """The synthetic condition grid: arms x effects x policies.

    Horizons give every pair ``horizon_multiplier`` times the sample
    size required for 80% power at the condition's effect; zero-effect
    cells borrow the ``w = 0.3`` budget (see ``ZERO_EFFECT_ANCHOR_W``).
    """
    configs = []
    for k in arms:
        n_pairs = k * (k - 1) // 2
        for effect_w in effects_w:
            anchor = effect_w if effect_w > 0 else ZERO_EFFECT_ANCHOR_W
            m = required_sample_size(
                PowerSpec(effect_w=anchor, alpha=significance_alpha)
            )
            horizon = horizon_for_condition(m, n_pairs, horizon_multiplier)
            checkpoints = default_checkpoints(horizon, checkpoint_count)
            for policy in policies:
                configs.append(
                    ExperimentConfig(
                        policy=policy,
                        environment=SyntheticEnvironment(k=k, effect_w=effect_w),
                        horizon=horizon,
                        replications=replications,
                        checkpoints=checkpoints,
                        base_seed=base_seed,
                        alpha_explore=alpha_explore,
                        significance_alpha=significance_alpha,
                        horizon_multiplier=horizon_multiplier,
                    )
                )
    return configs


def build_ltr_config(
    matrix_path: str,
    size: int,
    policy: str,
    mode: str = MODE_ANY,
    indices: tuple[int, ...] | None = None,
    multiplier: int = 1,
    base_seed: int = DEFAULT_BASE_SEED,
    replications: int = DEFAULT_REPLICATIONS,
    checkpoint_count: int = DEFAULT_CHECKPOINT_COUNT,
    alpha_explore: float = ALPHA_EXPLORE,
    significance_alpha: float = 0.05,
) -> ExperimentConfig:
    """Condition over a ranker-derived subset, budgeted like
    :func:`duelsim.ltr.ltr_condition`."""
    environment = LtrEnvironment(
        matrix_path=matrix_path,
        size=size,
        mode=mode,
        indices=tuple(indices) if indices is not None else None,
        multiplier=multiplier,
    )
    n_pairs = size * (size - 1) // 2
    horizon = horizon_for_condition(_planning_sample_size(), n_pairs, multiplier)
    return ExperimentConfig(
        policy=policy,
        environment=environment,
        horizon=horizon,
        replications=replications,
        checkpoints=default_checkpoints(horizon, checkpoint_count),
        base_seed=base_seed,
        alpha_explore=alpha_explore,
        significance_alpha=significance_alpha,
        horizon_multiplier=multiplier,
    )
