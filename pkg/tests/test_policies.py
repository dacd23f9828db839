"""Tests for the uniform and adaptive pair-selection policies."""

from __future__ import annotations

from collections import Counter
from math import log, sqrt

import numpy as np
import pytest

from duelsim import (
    ALPHA_EXPLORE,
    ArmPair,
    DtsState,
    InvalidWinner,
    RangeError,
    ShapeError,
    chi_square_sf,
    dts_bounds,
    dts_select,
    dts_update,
    new_preference_matrix,
    sample_duel,
    uniform_select,
)
from duelsim.policies import _sample_theta

from _oracles import transitive_entries


class TestArmPair:
    def test_fields_and_unordered(self) -> None:
        pair = ArmPair(first=2, second=0)
        assert pair.unordered() == (0, 2)

    def test_self_pair_rejected(self) -> None:
        with pytest.raises(RangeError):
            ArmPair(first=1, second=1)


class TestUniformSelect:
    def test_two_arms_always_the_single_pair(self) -> None:
        rng = np.random.default_rng(2001)
        orders = set()
        for _ in range(200):
            pair = uniform_select(2, rng)
            assert pair.unordered() == (0, 1)
            orders.add((pair.first, pair.second))
        assert orders == {(0, 1), (1, 0)}

    def test_needs_two_arms(self) -> None:
        with pytest.raises(RangeError):
            uniform_select(1, np.random.default_rng(0))

    def test_three_arm_pair_frequencies(self) -> None:
        # Each unordered pair has probability 1/3; 500 is ~4.3 sigma of
        # the binomial count at 60,000 draws.
        rng = np.random.default_rng(2002)
        counts: Counter[tuple[int, int]] = Counter()
        for _ in range(60_000):
            counts[uniform_select(3, rng).unordered()] += 1
        assert set(counts) == {(0, 1), (0, 2), (1, 2)}
        for count in counts.values():
            assert abs(count - 20_000) <= 500

    def test_five_arm_support(self) -> None:
        rng = np.random.default_rng(2003)
        ordered = {
            (pair.first, pair.second)
            for pair in (uniform_select(5, rng) for _ in range(4_000))
        }
        assert len(ordered) == 20

    def test_goodness_of_fit_over_unordered_pairs(self) -> None:
        rng = np.random.default_rng(2004)
        n = 100_000
        counts: Counter[tuple[int, int]] = Counter()
        for _ in range(n):
            counts[uniform_select(4, rng).unordered()] += 1
        expected = n / 6
        stat = sum((c - expected) ** 2 / expected for c in counts.values())
        assert chi_square_sf(stat, 5) > 0.001


class TestDtsState:
    def test_fresh(self) -> None:
        state = DtsState.fresh(3)
        assert state.k == 3
        assert state.t == 0
        assert state.alpha_explore == ALPHA_EXPLORE == 0.6
        assert np.all(state.b == 0)

    def test_custom_alpha(self) -> None:
        assert DtsState.fresh(2, alpha_explore=0.8).alpha_explore == 0.8

    def test_alpha_must_exceed_half(self) -> None:
        with pytest.raises(RangeError):
            DtsState.fresh(2, alpha_explore=0.5)

    def test_shape_checked(self) -> None:
        with pytest.raises(ShapeError):
            DtsState(k=3, b=np.zeros((2, 2), dtype=np.int64), t=0)

    def test_negative_counts_rejected(self) -> None:
        b = np.zeros((2, 2), dtype=np.int64)
        b[0, 1] = -1
        with pytest.raises(RangeError):
            DtsState(k=2, b=b, t=-1)

    def test_diagonal_must_be_zero(self) -> None:
        b = np.zeros((2, 2), dtype=np.int64)
        b[0, 0] = 1
        with pytest.raises(RangeError):
            DtsState(k=2, b=b, t=1)

    def test_time_must_match_totals(self) -> None:
        b = np.zeros((2, 2), dtype=np.int64)
        b[0, 1] = 3
        with pytest.raises(RangeError):
            DtsState(k=2, b=b, t=2)


class TestDtsBounds:
    def test_unobserved_pair_is_maximally_uncertain(self) -> None:
        assert dts_bounds(DtsState.fresh(3), 0, 1) == (1.0, 0.0)

    def test_symmetric_counts(self) -> None:
        b = np.zeros((2, 2), dtype=np.int64)
        b[0, 1] = 8
        b[1, 0] = 8
        state = DtsState(k=2, b=b, t=16, alpha_explore=0.6)
        upper, lower = dts_bounds(state, 0, 1)
        c = sqrt(0.6 * log(16) / 16)
        assert upper == pytest.approx(0.5 + c, abs=1e-12)
        assert lower == pytest.approx(0.5 - c, abs=1e-12)
        assert upper == pytest.approx(0.8225, abs=1e-3)
        assert lower == pytest.approx(0.1775, abs=1e-3)

    def test_single_observation_collapses_width(self) -> None:
        # ln(1) = 0, so at t = 1 the interval degenerates to the point
        # estimate.
        b = np.zeros((2, 2), dtype=np.int64)
        b[0, 1] = 1
        state = DtsState(k=2, b=b, t=1)
        assert dts_bounds(state, 0, 1) == (1.0, 1.0)
        assert dts_bounds(state, 1, 0) == (0.0, 0.0)

    def test_index_errors(self) -> None:
        state = DtsState.fresh(3)
        with pytest.raises(IndexError):
            dts_bounds(state, 1, 1)
        with pytest.raises(IndexError):
            dts_bounds(state, 0, 3)

    def test_matches_formula_on_random_states(self) -> None:
        rng = np.random.default_rng(2005)
        for _ in range(500):
            k = int(rng.integers(2, 6))
            b = np.zeros((k, k), dtype=np.int64)
            iu = np.triu_indices(k, 1)
            b[iu] = rng.integers(0, 30, size=len(iu[0]))
            b.T[iu] = rng.integers(0, 30, size=len(iu[0]))
            state = DtsState(k=k, b=b, t=int(b.sum()))
            i, j = (int(x) for x in rng.choice(k, size=2, replace=False))
            n = int(b[i, j] + b[j, i])
            upper, lower = dts_bounds(state, i, j)
            if n == 0:
                assert (upper, lower) == (1.0, 0.0)
            else:
                c = sqrt(0.6 * log(state.t) / n)
                assert upper == pytest.approx(b[i, j] / n + c, abs=1e-12)
                assert lower == pytest.approx(b[i, j] / n - c, abs=1e-12)


class TestDtsUpdate:
    def test_records_in_place(self) -> None:
        state = DtsState.fresh(3)
        returned = dts_update(state, ArmPair(first=0, second=2), winner=2)
        assert returned is state
        assert state.t == 1
        assert state.b[2, 0] == 1
        assert state.b[0, 2] == 0

    def test_winner_must_be_in_pair(self) -> None:
        state = DtsState.fresh(3)
        with pytest.raises(InvalidWinner):
            dts_update(state, ArmPair(first=0, second=1), winner=2)

    def test_posterior_mean_monotone_in_wins(self) -> None:
        # After n unbroken wins of arm 0 the posterior mean of P[0, 1] is
        # (n + 1) / (n + 2), strictly increasing in n.
        state = DtsState.fresh(2)
        means = []
        for _ in range(51):
            n = int(state.b[0, 1])
            means.append((n + 1) / (n + 2))
            dts_update(state, ArmPair(first=0, second=1), winner=0)
        assert state.b[0, 1] == 51
        assert all(a < b for a, b in zip(means, means[1:]))


class TestSampleTheta:
    def test_antisymmetry_exact(self) -> None:
        rng = np.random.default_rng(2006)
        b = np.zeros((4, 4), dtype=np.int64)
        b[np.triu_indices(4, 1)] = [5, 0, 2, 9, 1, 7]
        for _ in range(2_000):
            theta = _sample_theta(b, rng)
            assert np.all(theta + theta.T == 1.0)
            assert np.all(np.diagonal(theta) == 0.5)

    def test_tracks_posterior_counts(self) -> None:
        # 40 wins vs none drives the Beta(41, 1) draw far above 0.5.
        rng = np.random.default_rng(2007)
        b = np.zeros((2, 2), dtype=np.int64)
        b[0, 1] = 40
        draws = np.array([_sample_theta(b, rng)[0, 1] for _ in range(500)])
        assert np.mean(draws > 0.5) > 0.99


class TestDtsSelect:
    def test_never_selects_self_pair(self) -> None:
        rng = np.random.default_rng(2008)
        state = DtsState.fresh(4)
        for _ in range(500):
            pair = dts_select(state, rng)
            assert pair.first != pair.second
            winner = pair.first if rng.random() < 0.5 else pair.second
            dts_update(state, pair, winner)

    def test_dominant_counts_force_the_pair(self) -> None:
        # Arm 0 has won 40 of 50 duels: its upper bound is the only one
        # above 0.5, and arm 1 stays eligible as challenger, so the
        # selection is deterministic.
        rng = np.random.default_rng(2009)
        b = np.zeros((2, 2), dtype=np.int64)
        b[0, 1] = 40
        b[1, 0] = 10
        state = DtsState(k=2, b=b, t=50)
        for _ in range(200):
            pair = dts_select(state, rng)
            assert (pair.first, pair.second) == (0, 1)

    def test_fresh_state_uniform_over_pairs(self) -> None:
        # With no data every phase is symmetric, so unordered pairs are
        # uniform: 447 is 3 sigma of the count at 100,000 draws.
        rng = np.random.default_rng(2010)
        state = DtsState.fresh(3)
        counts: Counter[tuple[int, int]] = Counter()
        for _ in range(100_000):
            counts[dts_select(state, rng).unordered()] += 1
        assert set(counts) == {(0, 1), (0, 2), (1, 2)}
        for count in counts.values():
            assert abs(count - 100_000 / 3) <= 447

    def test_concentrates_on_best_arm(self) -> None:
        # On a transitive three-arm matrix with 0.25 gaps the best arm
        # should occupy a slot in well over 90% of duels at the grid
        # horizon.
        matrix = new_preference_matrix(transitive_entries(3, 0.25))
        rng = np.random.default_rng(2011)
        shares = []
        for _ in range(25):
            state = DtsState.fresh(3)
            hits = 0
            for _ in range(960):
                pair = dts_select(state, rng)
                winner = sample_duel(
                    matrix, pair.first, pair.second, float(rng.random())
                )
                dts_update(state, pair, winner)
                if 0 in (pair.first, pair.second):
                    hits += 1
            shares.append(hits / 960)
        assert float(np.mean(shares)) > 0.9
