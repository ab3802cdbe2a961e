"""Smoothed ranks, valid-pair counting, top-q truncation, balance constants.

The balance constant divides each anchor's pair-error sum and is treated as
a constant under differentiation. Two modes:

  ranksum   rank+(u) + rank-(u), where rank+ counts positives at or above
            the anchor (smoothed by a ramp, self term included so
            rank+ >= 1) and rank- counts negatives above it. Always
            computed over the full set, never the truncated pair set.
  negcount  the number of negatives that beat the anchor by more than the
            filter threshold. Zero means the anchor has no valid errors
            and is skipped (balance_constant returns None).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distance import step_distance
from .types import FilterMode, Label, LossConfig, PairBudget, ScoreSet, ValidationError


@dataclass(frozen=True)
class RankStats:
    """Per-anchor bookkeeping emitted alongside the loss."""

    anchor_index: int
    rank_plus: float
    rank_minus: float
    balance_constant: float | None
    n_neg: int
    active_pairs: int


def _check_anchor(score_set: ScoreSet, u: int) -> int:
    u = int(u)
    if not 0 <= u < len(score_set):
        raise ValidationError(f"anchor index {u} out of range for set of {len(score_set)}")
    if score_set.labels[u] != Label.POSITIVE:
        raise ValidationError(f"anchor index {u} is not labelled positive")
    return u


def compute_ranks(score_set: ScoreSet, u: int, rank_delta: float = 0.5) -> tuple[float, float]:
    """Smoothed (rank+, rank-) of positive anchor u.

    rank+ = 1 + sum over other positives of H(score[p] - score[u]);
    rank- = sum over all negatives of H(score[n] - score[u]).
    The leading 1 is the anchor's own contribution, so rank+ >= 1 always.
    """
    u = _check_anchor(score_set, u)
    if not (math.isfinite(rank_delta) and rank_delta > 0):
        raise ValidationError(f"rank_delta must be > 0, got {rank_delta!r}")
    scores = score_set.scores
    s_u = scores[u]
    pos = score_set.positive_indices
    pos = pos[pos != u]
    rank_plus = 1.0 + float(np.sum(step_distance(scores[pos] - s_u, rank_delta))) if pos.size else 1.0
    neg = score_set.negative_indices
    rank_minus = float(np.sum(step_distance(scores[neg] - s_u, rank_delta))) if neg.size else 0.0
    return rank_plus, rank_minus


def valid_pair_indicator(p_u: float, p_v: float, threshold: float = 0.25) -> int:
    """1 when negative score p_v beats anchor score p_u by more than threshold."""
    p_u, p_v, threshold = float(p_u), float(p_v), float(threshold)
    if not (math.isfinite(p_u) and math.isfinite(p_v)):
        raise ValidationError("scores must be finite")
    if not (math.isfinite(threshold) and threshold >= 0):
        raise ValidationError(f"threshold must be >= 0, got {threshold!r}")
    return int(p_v - p_u > threshold)


def valid_negative_count(score_set: ScoreSet, u: int, threshold: float = 0.25) -> int:
    """Number of negatives forming a valid error pair with anchor u."""
    u = _check_anchor(score_set, u)
    if not (math.isfinite(threshold) and threshold >= 0):
        raise ValidationError(f"threshold must be >= 0, got {threshold!r}")
    neg = score_set.negative_indices
    if neg.size == 0:
        return 0
    diffs = score_set.scores[neg] - score_set.scores[u]
    return int(np.count_nonzero(diffs > threshold))


def select_top_q_negatives(score_set: ScoreSet, budget: PairBudget) -> np.ndarray:
    """Indices of the q highest-scoring negatives, ascending index order.

    Ties on score are broken by ascending original index; an unlimited or
    non-binding budget returns every negative. The same selection serves
    every anchor.
    """
    if not isinstance(budget, PairBudget):
        raise ValidationError("budget must be a PairBudget")
    neg = score_set.negative_indices
    if not budget.bounded or neg.size <= budget.q:
        return neg
    # stable sort on negated scores: equal scores keep ascending index order
    order = np.argsort(-score_set.scores[neg], kind="stable")
    kept = neg[order[: budget.q]]
    kept.sort()
    return kept


def balance_constant(score_set: ScoreSet, u: int, config: LossConfig) -> float | None:
    """Denominator for anchor u under config, or None when the anchor is skipped.

    ranksum mode always yields a value >= 1 (the self term); negcount mode
    yields None when no negative clears the threshold.
    """
    u = _check_anchor(score_set, u)
    if config.pair_filter.mode is FilterMode.RANK_SUM:
        rank_plus, rank_minus = compute_ranks(score_set, u, config.rank_delta)
        return rank_plus + rank_minus
    n = valid_negative_count(score_set, u, config.pair_filter.threshold)
    return float(n) if n > 0 else None
