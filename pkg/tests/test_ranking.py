"""Rank statistics, filtering, truncation, and balance constant tests."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pairloss import (
    FilterMode,
    FilterSpec,
    LossConfig,
    PairBudget,
    ValidationError,
    balance_constant,
    compute_ranks,
    select_top_q_negatives,
    valid_negative_count,
    valid_pair_indicator,
)

from conftest import make_set, random_score_set


class TestComputeRanks:
    def test_lone_positive(self):
        ss = make_set([0.7], [1])
        assert compute_ranks(ss, 0, 0.5) == (1.0, 0.0)

    def test_negative_far_below(self):
        ss = make_set([0.9, 0.1], [1, 0])
        assert compute_ranks(ss, 0, 0.5) == (1.0, 0.0)

    def test_three_way_tie(self):
        # tied positive contributes H(0) = 0.5, tied negative likewise
        ss = make_set([0.6, 0.6, 0.6], [1, 1, 0])
        assert compute_ranks(ss, 0, 0.5) == (1.5, 0.5)

    def test_ignores_do_not_count(self):
        ss = make_set([0.6, 0.9, 0.9], [1, -1, -1])
        assert compute_ranks(ss, 0, 0.5) == (1.0, 0.0)

    def test_rank_plus_at_least_one(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            ss = random_score_set(rng, int(rng.integers(2, 40)))
            for u in ss.positive_indices:
                rank_plus, rank_minus = compute_ranks(ss, int(u), 0.5)
                assert rank_plus >= 1.0
                assert rank_minus >= 0.0

    def test_rejects_non_positive_anchor(self):
        ss = make_set([0.6, 0.4], [1, 0])
        with pytest.raises(ValidationError):
            compute_ranks(ss, 1, 0.5)
        with pytest.raises(ValidationError):
            compute_ranks(ss, 5, 0.5)

    def test_rejects_bad_rank_delta(self):
        ss = make_set([0.6], [1])
        with pytest.raises(ValidationError):
            compute_ranks(ss, 0, 0.0)


class TestValidPairIndicator:
    def test_fires_above_threshold(self):
        assert valid_pair_indicator(0.3, 0.6, 0.25) == 1

    def test_quiet_below_threshold(self):
        assert valid_pair_indicator(0.3, 0.5, 0.25) == 0

    def test_strict_at_equality(self):
        assert valid_pair_indicator(0.4, 0.4, 0.0) == 0

    def test_rejects_negative_threshold(self):
        with pytest.raises(ValidationError):
            valid_pair_indicator(0.3, 0.6, -0.1)

    @given(
        p_u=st.floats(-5, 5, allow_nan=False),
        p_v=st.floats(-5, 5, allow_nan=False),
        threshold=st.floats(0, 2, allow_nan=False),
    )
    def test_matches_definition(self, p_u, p_v, threshold):
        assert valid_pair_indicator(p_u, p_v, threshold) == int(p_v - p_u > threshold)


class TestValidNegativeCount:
    def test_nothing_above(self):
        ss = make_set([0.8, 0.1, 0.2], [1, 0, 0])
        assert valid_negative_count(ss, 0, 0.25) == 0

    def test_enumerated(self):
        ss = make_set([0.3, 0.6, 0.5, 0.2], [1, 0, 0, 0])
        assert valid_negative_count(ss, 0, 0.25) == 1

    def test_bounded_by_negative_count(self):
        rng = np.random.default_rng(6)
        for _ in range(25):
            ss = random_score_set(rng, int(rng.integers(2, 40)))
            n_neg = ss.negative_indices.size
            for u in ss.positive_indices:
                assert 0 <= valid_negative_count(ss, int(u), 0.1) <= n_neg

    def test_monotone_in_threshold(self):
        rng = np.random.default_rng(7)
        thresholds = [0.0, 0.1, 0.25, 0.5, 1.0]
        for _ in range(25):
            ss = random_score_set(rng, int(rng.integers(2, 60)))
            for u in ss.positive_indices:
                counts = [valid_negative_count(ss, int(u), t) for t in thresholds]
                assert counts == sorted(counts, reverse=True)


class TestSelectTopQ:
    def test_unbounded_returns_all(self):
        ss = make_set([0.1, 0.9, 0.5], [1, 0, 0])
        out = select_top_q_negatives(ss, PairBudget.unlimited())
        assert out.tolist() == [1, 2]

    def test_budget_not_binding(self):
        ss = make_set([0.1, 0.9, 0.5], [1, 0, 0])
        assert select_top_q_negatives(ss, PairBudget(10)).tolist() == [1, 2]

    def test_top_two_by_score_in_index_order(self):
        scores = np.zeros(8)
        labels = np.full(8, -1)
        scores[[2, 5, 7]] = [0.9, 0.1, 0.5]
        labels[[2, 5, 7]] = 0
        ss = make_set(scores, labels)
        assert select_top_q_negatives(ss, PairBudget(2)).tolist() == [2, 7]

    def test_ties_break_by_ascending_index(self):
        scores = np.zeros(10)
        labels = np.full(10, -1)
        scores[[1, 4, 9]] = 0.5
        labels[[1, 4, 9]] = 0
        ss = make_set(scores, labels)
        assert select_top_q_negatives(ss, PairBudget(2)).tolist() == [1, 4]

    def test_nested_in_budget(self):
        """Raising q never drops a selected index."""
        rng = np.random.default_rng(8)
        for _ in range(25):
            n = int(rng.integers(3, 50))
            ss = random_score_set(rng, n)
            previous: set[int] = set()
            for q in range(1, ss.negative_indices.size + 1):
                selected = set(select_top_q_negatives(ss, PairBudget(q)).tolist())
                assert len(selected) == min(q, ss.negative_indices.size)
                assert previous <= selected
                previous = selected

    def test_subset_of_negatives_and_sorted(self):
        rng = np.random.default_rng(9)
        for _ in range(25):
            ss = random_score_set(rng, int(rng.integers(2, 50)))
            out = select_top_q_negatives(ss, PairBudget(3))
            assert np.all(np.diff(out) > 0)
            assert set(out.tolist()) <= set(ss.negative_indices.tolist())


class TestBalanceConstant:
    def test_ranksum_lone_positive(self):
        ss = make_set([0.7], [1])
        assert balance_constant(ss, 0, LossConfig()) == 1.0

    def test_negcount_no_qualifier_is_absent(self):
        ss = make_set([0.8, 0.1], [1, 0])
        config = LossConfig(pair_filter=FilterSpec(mode=FilterMode.VALID_NEG_COUNT))
        assert balance_constant(ss, 0, config) is None

    def test_ranksum_tied_triple(self):
        ss = make_set([0.6, 0.6, 0.6], [1, 1, 0])
        assert balance_constant(ss, 0, LossConfig()) == 2.0

    def test_negcount_counts(self):
        ss = make_set([0.3, 0.6, 0.5, 0.2], [1, 0, 0, 0])
        config = LossConfig(pair_filter=FilterSpec(mode=FilterMode.VALID_NEG_COUNT, threshold=0.25))
        assert balance_constant(ss, 0, config) == 1.0

    def test_always_at_least_one_in_ranksum(self):
        rng = np.random.default_rng(10)
        config = LossConfig()
        for _ in range(25):
            ss = random_score_set(rng, int(rng.integers(2, 40)))
            for u in ss.positive_indices:
                assert balance_constant(ss, int(u), config) >= 1.0


class TestShiftInvariance:
    def test_rank_ops_depend_only_on_differences(self):
        """Shifting every score by an exactly-representable constant leaves
        ranks, counts, and selections bit-identical."""
        rng = np.random.default_rng(11)
        for _ in range(20):
            n = int(rng.integers(2, 40))
            lattice = rng.integers(-2000, 2000, n) / 1024.0
            labels = rng.choice([1, 0, -1], size=n, p=[0.4, 0.5, 0.1])
            if not (labels == 1).any():
                labels[0] = 1
            ss = make_set(lattice, labels)
            shift = float(rng.integers(-4000, 4000)) / 1024.0
            shifted = make_set(lattice + shift, labels)
            for u in ss.positive_indices:
                assert compute_ranks(ss, int(u), 0.5) == compute_ranks(shifted, int(u), 0.5)
                assert valid_negative_count(ss, int(u), 0.25) == valid_negative_count(shifted, int(u), 0.25)
            budget = PairBudget(3)
            assert np.array_equal(
                select_top_q_negatives(ss, budget), select_top_q_negatives(shifted, budget)
            )


def _naive_ranks(ss, u, rank_delta):
    def ramp(x):
        t = 0.5 + 0.5 * (x / rank_delta)
        return min(1.0, max(0.0, t))

    rank_plus = 1.0
    rank_minus = 0.0
    for j in range(len(ss)):
        if j == u:
            continue
        if ss.labels[j] == 1:
            rank_plus += ramp(float(ss.scores[j] - ss.scores[u]))
        elif ss.labels[j] == 0:
            rank_minus += ramp(float(ss.scores[j] - ss.scores[u]))
    return rank_plus, rank_minus


class TestNaiveReference:
    def test_ranks_match_double_loop(self):
        rng = np.random.default_rng(12)
        for _ in range(40):
            ss = random_score_set(rng, int(rng.integers(2, 50)))
            for u in ss.positive_indices:
                fast = compute_ranks(ss, int(u), 0.5)
                slow = _naive_ranks(ss, int(u), 0.5)
                assert fast[0] == pytest.approx(slow[0], rel=1e-12, abs=1e-12)
                assert fast[1] == pytest.approx(slow[1], rel=1e-12, abs=1e-12)

    def test_counts_match_double_loop(self):
        rng = np.random.default_rng(13)
        for _ in range(40):
            ss = random_score_set(rng, int(rng.integers(2, 50)))
            for u in ss.positive_indices:
                naive = sum(
                    1
                    for j in range(len(ss))
                    if ss.labels[j] == 0 and float(ss.scores[j] - ss.scores[u]) > 0.25
                )
                assert valid_negative_count(ss, int(u), 0.25) == naive

    def test_topq_matches_sorted_reference(self):
        rng = np.random.default_rng(14)
        for _ in range(40):
            ss = random_score_set(rng, int(rng.integers(2, 50)))
            q = int(rng.integers(1, 8))
            neg = [int(i) for i in ss.negative_indices]
            expected = sorted(sorted(neg, key=lambda i: (-float(ss.scores[i]), i))[:q])
            assert select_top_q_negatives(ss, PairBudget(q)).tolist() == expected
