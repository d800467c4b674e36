import itertools
import math

import numpy as np
import pytest

from jsrkit import bounds
from jsrkit.bounds import (
    BoundsReport,
    BoundsRow,
    BudgetCounter,
    BudgetExceededError,
    MatrixSet,
    fit_rate,
    product_of_word,
    pruned_bounds,
    rho_minus_n,
    rho_plus_n,
    sandwich,
)
from jsrkit.gallery import antidiagonal_pair, rank_one_pair

SQRT2 = math.sqrt(2.0)


def brute_force_level(mset, n):
    """Independent enumeration: plain loops over all words."""
    out = {}
    for word in itertools.product(range(len(mset)), repeat=n):
        P = np.eye(mset.d, dtype=complex)
        for s in word:
            P = mset.matrices[s] @ P
        out[word] = P
    return out


class TestProductOfWord:
    def test_applies_first_index_first(self):
        E1 = antidiagonal_pair()
        # word (swap, double-swap): swap acts first, so the product is
        # double-swap @ swap = diag(2, 1/2)
        P = product_of_word(E1, (1, 0))
        assert P == pytest.approx(np.diag([2.0, 0.5]))

    def test_empty_word_is_identity(self):
        E1 = antidiagonal_pair()
        assert product_of_word(E1, ()) == pytest.approx(np.eye(2))

    def test_involution_squares_to_identity(self):
        E1 = antidiagonal_pair()
        assert product_of_word(E1, (0, 0)) == pytest.approx(np.eye(2))

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            product_of_word(antidiagonal_pair(), (0, 2))

    def test_matches_brute_force(self):
        rng = np.random.default_rng(3)
        mats = rng.standard_normal((3, 2, 2)) + 1j * rng.standard_normal((3, 2, 2))
        mset = MatrixSet(list(mats))
        for word, P in brute_force_level(mset, 3).items():
            assert product_of_word(mset, word) == pytest.approx(P)


class TestRhoPlus:
    def test_rank_one_pair_closed_form(self):
        E2 = rank_one_pair()
        for n in range(1, 7):
            got = rho_plus_n(E2, n)
            assert got.value == pytest.approx(2 ** (1 + 1 / (2 * n)), rel=1e-12)

    def test_identity_singleton(self):
        one = MatrixSet([np.eye(2)])
        for n in (1, 3, 5):
            assert rho_plus_n(one, n).value == pytest.approx(1.0)

    def test_reports_lexicographically_first_word(self):
        E2 = rank_one_pair()
        assert rho_plus_n(E2, 2).word == (0, 0)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(4)
        mats = rng.standard_normal((2, 2, 2))
        mset = MatrixSet(list(mats))
        for n in (1, 2, 4):
            oracle = max(
                np.linalg.norm(P, 2) ** (1 / n)
                for P in brute_force_level(mset, n).values()
            )
            assert rho_plus_n(mset, n).value == pytest.approx(oracle, rel=1e-12)

    def test_budget_error_names_limit(self):
        E2 = rank_one_pair()
        with pytest.raises(BudgetExceededError, match="budget is 10"):
            rho_plus_n(E2, 10, budget=10)


class TestRhoMinus:
    def test_rank_one_pair(self):
        assert rho_minus_n(rank_one_pair(), 1).value == pytest.approx(2.0, abs=1e-12)

    def test_antidiagonal_even_length(self):
        assert rho_minus_n(antidiagonal_pair(), 2).value == pytest.approx(SQRT2, rel=1e-12)

    def test_antidiagonal_odd_length_collapses(self):
        # every length-3 product has spectral radius exactly 1, so the
        # lower sequence dips; its limsup is not a limit
        assert rho_minus_n(antidiagonal_pair(), 3).value == pytest.approx(1.0, rel=1e-12)

    def test_matches_brute_force(self):
        E1 = antidiagonal_pair()
        for n in (2, 3, 5):
            oracle = max(
                max(abs(np.linalg.eigvals(P))) ** (1 / n)
                for P in brute_force_level(E1, n).values()
            )
            assert rho_minus_n(E1, n).value == pytest.approx(oracle, rel=1e-12)

    def test_tie_words_recorded_without_interpretation(self):
        got = rho_minus_n(rank_one_pair(), 1, ties=True)
        assert got.word == (0,)
        assert got.ties == ((0,), (1,))


class TestSandwich:
    def test_rank_one_pair(self):
        report = sandwich(rank_one_pair(), 3)
        assert report.best_lower() == pytest.approx(2.0, abs=1e-12)
        assert report.best_upper() == pytest.approx(2 ** (7 / 6), rel=1e-12)
        assert all(row.best_lower == pytest.approx(2.0) for row in report.rows)

    def test_scalar_singleton_closes_immediately(self):
        report = sandwich(MatrixSet([np.diag([0.5, 1 / 3])]), 2)
        assert report.rows[0].best_lower == pytest.approx(0.5)
        assert report.rows[0].best_upper == pytest.approx(0.5)

    def test_antidiagonal_lower_sticks_at_sqrt2(self):
        report = sandwich(antidiagonal_pair(), 4)
        for row in report.rows[1:]:
            assert row.best_lower == pytest.approx(SQRT2, rel=1e-12)

    def test_running_bounds_are_monotone_and_ordered(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            mats = 0.8 * rng.standard_normal((2, 3, 3))
            report = sandwich(MatrixSet(list(mats)), 6)
            lowers = [row.best_lower for row in report.rows]
            uppers = [row.best_upper for row in report.rows]
            assert lowers == sorted(lowers)
            assert uppers == sorted(uppers, reverse=True)
            for lo, hi in zip(lowers, uppers):
                assert lo <= hi + 1e-9

    def test_budget_exhaustion_truncates_with_flag(self):
        report = sandwich(rank_one_pair(), 12, budget=BudgetCounter(60))
        assert report.truncated
        assert 0 < len(report.rows) < 12


class TestProperties:
    def test_submultiplicative_upper_sequence(self):
        rng = np.random.default_rng(6)
        for _ in range(6):
            k = int(rng.integers(2, 4))
            d = int(rng.integers(2, 4))
            mset = MatrixSet(list(rng.standard_normal((k, d, d))))
            values = {n: rho_plus_n(mset, n).value for n in range(1, 7)}
            for n in range(1, 6):
                for m in range(1, 7 - n):
                    lhs = values[n + m] ** (n + m)
                    rhs = values[n] ** n * values[m] ** m
                    assert lhs <= rhs * (1 + 1e-9)

    def test_lower_sequence_monotone_under_powers(self):
        rng = np.random.default_rng(7)
        for _ in range(6):
            mset = MatrixSet(list(rng.standard_normal((2, 2, 2))))
            values = {n: rho_minus_n(mset, n).value for n in range(1, 9)}
            for n in range(1, 9):
                for m in range(2, 9):
                    if n * m <= 8:
                        assert values[n * m] >= values[n] * (1 - 1e-9)

    def test_lower_below_upper_per_length(self):
        rng = np.random.default_rng(8)
        for _ in range(6):
            mset = MatrixSet(list(rng.standard_normal((2, 3, 3))))
            for n in range(1, 5):
                assert rho_minus_n(mset, n).value <= rho_plus_n(mset, n).value * (1 + 1e-12)

    def test_worker_count_does_not_change_anything(self):
        E1 = antidiagonal_pair()
        for n in (1, 3, 5):
            results = [rho_plus_n(E1, n, workers=w) for w in (1, 2, 8)]
            assert len({r.value for r in results}) == 1
            assert len({r.word for r in results}) == 1
            results = [rho_minus_n(E1, n, workers=w) for w in (1, 2, 8)]
            assert len({r.value for r in results}) == 1
            assert len({r.word for r in results}) == 1


class TestPrunedBounds:
    def test_rank_one_pair(self):
        result = pruned_bounds(rank_one_pair(), delta=0.1)
        assert result.conclusive
        assert result.lower <= 2.0 <= result.upper
        assert result.upper - result.lower <= 0.1

    def test_scalar_singleton(self):
        result = pruned_bounds(MatrixSet([2 * np.eye(2)]), delta=0.5)
        assert result.lower == pytest.approx(2.0)
        assert result.upper == pytest.approx(2.0)

    def test_antidiagonal_pair(self):
        result = pruned_bounds(antidiagonal_pair(), delta=0.05)
        assert result.conclusive
        assert result.lower <= SQRT2 * (1 + 1e-12)
        assert SQRT2 <= result.upper * (1 + 1e-12)
        assert result.upper - result.lower <= 0.05

    def test_interval_consistent_with_sandwich(self):
        for mset in (rank_one_pair(), antidiagonal_pair()):
            result = pruned_bounds(mset, delta=0.1, max_depth=8)
            report = sandwich(mset, 8)
            # both enclose the target, so they overlap, and the pruned lower
            # bound can only come from a subset of the words the sandwich saw
            assert result.lower <= report.best_lower() + 1e-9
            assert result.lower <= report.best_upper() + 1e-9
            assert report.best_lower() <= result.upper + 1e-9
            mid = 0.5 * (report.best_lower() + report.best_upper())
            assert result.lower - 1e-9 <= mid <= result.upper + 1e-9

    def test_inconclusive_flag_when_depth_hit(self):
        result = pruned_bounds(rank_one_pair(), delta=1e-6, max_depth=4)
        assert not result.conclusive
        assert result.upper - result.lower > 1e-6

    def test_rejects_bad_delta(self):
        with pytest.raises(ValueError):
            pruned_bounds(rank_one_pair(), delta=0.0)


def synthetic_report(gaps):
    rows = [
        BoundsRow(n, 2.0 + g, 2.0, 2.0, 2.0 + g, g, (0,), (0,))
        for n, g in enumerate(gaps, start=1)
    ]
    return BoundsReport(rows=rows)


class TestFitRate:
    def test_quadratic_gap(self):
        report = synthetic_report([n ** (-2.0) for n in range(1, 13)])
        fit = fit_rate(report, 0.5)
        assert fit.r_hat == pytest.approx(2.0, abs=1e-6)
        assert fit.r_squared > 1 - 1e-9

    def test_linear_gap_with_prefactor(self):
        report = synthetic_report([3.0 / n for n in range(1, 13)])
        fit = fit_rate(report, 0.5)
        assert fit.r_hat == pytest.approx(1.0, abs=1e-6)

    def test_rank_one_pair_rate_is_one(self):
        report = sandwich(rank_one_pair(), 12)
        fit = fit_rate(report, 0.5)
        assert fit.r_hat == pytest.approx(1.0, abs=0.1)

    def test_collapsed_gap_flags_convergence(self):
        report = synthetic_report([1e-15] * 12)
        fit = fit_rate(report, 0.9)
        assert fit.converged

    def test_short_tail_rejected(self):
        report = synthetic_report([1.0 / n for n in range(1, 5)])
        with pytest.raises(ValueError):
            fit_rate(report, 0.5)


class TestMatrixSet:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            MatrixSet([])

    def test_rejects_mixed_dimensions(self):
        with pytest.raises(bounds.linalg.DimensionError):
            MatrixSet([np.eye(2), np.eye(3)])

    def test_scaled(self):
        E2 = rank_one_pair()
        half = E2.scaled(0.5)
        assert half.matrices[0] == pytest.approx(0.5 * E2.matrices[0])
        assert half.labels == E2.labels
