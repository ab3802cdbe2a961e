"""Forward loss and its two analytic gradient forms.

Per positive anchor u the loss is

    l(u) = sum over paired negatives v of D(score[v] - score[u]) / BC(u)

where D is the configured distance and BC(u) the balance constant, which is
treated as a constant under differentiation. The pair set is the global
top-q negative selection, optionally restricted to valid errors (negcount
mode with filter_numerator).

Two gradient derivations are exposed as genuinely separate code paths:

  error-driven  accumulates sigmoid error masses S(score[v] - score[u]) and
                negates their sum at the anchor;
  autodiff-ce   walks the cross-entropy chain rule, whose lam factors cancel
                to d CE / d u = -S.

They are the same function in exact arithmetic; keeping both runnable is what
makes the equivalence testable. Either gradient call reports cross-entropy loss values
alongside the gradient.

Per-anchor pair sums go through math.fsum, so they are exactly rounded and
independent of pair order; anchor contributions then combine in ascending
anchor order. Threaded evaluation farms anchors to a thread pool but reduces
in the same order, so results are bit-identical to the sequential path.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import fsum

import numpy as np

from .distance import (
    ce_distance,
    ce_distance_grad_wrt_u,
    distance_value,
    sigmoid_distance,
)
from .ranking import (
    RankStats,
    compute_ranks,
    select_top_q_negatives,
    valid_negative_count,
)
from .types import (
    DistanceKind,
    FilterMode,
    GradientForm,
    LossConfig,
    Reduction,
    ScoreSet,
    ValidationError,
)

_FORWARD = "forward"


@dataclass(frozen=True)
class LossResult:
    """Outcome of one loss (and optionally gradient) evaluation.

    per_anchor_loss maps anchor index to its unreduced l(u); gradient is
    None for forward-only evaluation and has the reduction applied
    otherwise. truncated reports whether the pair budget actually cut the
    negative set; no_anchors flags a set without positive anchors (legal,
    loss 0).
    """

    total_loss: float
    per_anchor_loss: dict[int, float]
    gradient: np.ndarray | None
    stats: list[RankStats]
    truncated: bool
    no_anchors: bool = False

    @property
    def active_pairs(self) -> int:
        return sum(s.active_pairs for s in self.stats)


@dataclass(frozen=True)
class _AnchorOut:
    u: int
    loss: float
    stats: RankStats
    grad_u: float
    pair_indices: np.ndarray | None
    grad_pairs: np.ndarray | None


def _check_threads(threads: int) -> int:
    if isinstance(threads, bool) or not isinstance(threads, int):
        raise ValidationError(f"threads must be a positive integer, got {threads!r}")
    if threads < 1:
        raise ValidationError(f"threads must be >= 1, got {threads}")
    return threads


def _evaluate(score_set: ScoreSet, config: LossConfig, form: str, threads: int) -> LossResult:
    threads = _check_threads(threads)
    if not isinstance(score_set, ScoreSet):
        raise ValidationError("score_set must be a ScoreSet")
    if not isinstance(config, LossConfig):
        raise ValidationError("config must be a LossConfig")
    if form == GradientForm.ERROR_DRIVEN.value and not config.distance.is_smooth:
        raise ValidationError("error-driven gradient needs a sigmoid or ce-sigmoid distance")
    if form == GradientForm.AUTODIFF_CE.value and config.distance.kind is not DistanceKind.CE_SIGMOID:
        raise ValidationError("autodiff-ce gradient needs the ce-sigmoid distance")

    want_grad = form != _FORWARD
    scores = score_set.scores
    pos = score_set.positive_indices
    neg = score_set.negative_indices
    n = len(score_set)
    sel = select_top_q_negatives(score_set, config.budget)
    sel_scores = scores[sel]
    truncated = config.budget.bounded and neg.size > config.budget.q

    if pos.size == 0:
        grad = np.zeros(n) if want_grad else None
        return LossResult(0.0, {}, grad, [], truncated, no_anchors=True)

    mode = config.pair_filter.mode
    threshold = config.pair_filter.threshold
    restrict = mode is FilterMode.VALID_NEG_COUNT and config.pair_filter.filter_numerator
    lam = config.distance.lam

    def one_anchor(u: int) -> _AnchorOut:
        s_u = scores[u]
        n_neg = valid_negative_count(score_set, u, threshold)
        if mode is FilterMode.RANK_SUM:
            rank_plus, rank_minus = compute_ranks(score_set, u, config.rank_delta)
            bc = rank_plus + rank_minus
        else:
            rank_plus, rank_minus = 1.0, float(n_neg)
            bc = float(n_neg) if n_neg > 0 else None
        if bc is None:
            stats = RankStats(int(u), rank_plus, rank_minus, None, n_neg, 0)
            return _AnchorOut(int(u), 0.0, stats, 0.0, None, None)
        diffs = sel_scores - s_u
        keep = None
        if restrict:
            keep = diffs > threshold
            diffs = diffs[keep]
        active = int(diffs.size)
        stats = RankStats(int(u), rank_plus, rank_minus, bc, n_neg, active)
        if not want_grad:
            loss = fsum(distance_value(diffs, config.distance).tolist()) / bc
            return _AnchorOut(int(u), loss, stats, 0.0, None, None)
        loss = fsum(ce_distance(diffs, lam).tolist()) / bc
        if form == GradientForm.ERROR_DRIVEN.value:
            masses = sigmoid_distance(diffs, lam)
            grad_u = -fsum(masses.tolist()) / bc
            grad_pairs = masses / bc
        else:
            slopes = ce_distance_grad_wrt_u(diffs, lam)
            grad_u = fsum(slopes.tolist()) / bc
            grad_pairs = -slopes / bc
        pair_indices = sel[keep] if keep is not None else sel
        return _AnchorOut(int(u), loss, stats, grad_u, pair_indices, grad_pairs)

    anchors = [int(u) for u in pos]
    if threads == 1 or len(anchors) < 2:
        outs = [one_anchor(u) for u in anchors]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outs = list(pool.map(one_anchor, anchors))

    per_anchor = {out.u: out.loss for out in outs}
    total = fsum(out.loss for out in outs)
    n_pos = pos.size
    if config.reduction is Reduction.MEAN_OVER_POSITIVES:
        total /= n_pos

    grad = None
    if want_grad:
        grad = np.zeros(n)
        for out in outs:
            if out.pair_indices is None:
                continue
            grad[out.u] += out.grad_u
            grad[out.pair_indices] += out.grad_pairs
        if config.reduction is Reduction.MEAN_OVER_POSITIVES:
            grad /= n_pos

    stats = [out.stats for out in outs]
    return LossResult(float(total), per_anchor, grad, stats, truncated)


def evaluate_loss(score_set: ScoreSet, config: LossConfig, threads: int = 1) -> LossResult:
    """Forward evaluation under the configured distance; gradient is None."""
    return _evaluate(score_set, config, _FORWARD, threads)


def gradient_error_driven(score_set: ScoreSet, config: LossConfig, threads: int = 1) -> LossResult:
    """Loss plus gradient via accumulated sigmoid error masses."""
    return _evaluate(score_set, config, GradientForm.ERROR_DRIVEN.value, threads)


def gradient_autodiff_ce(score_set: ScoreSet, config: LossConfig, threads: int = 1) -> LossResult:
    """Loss plus gradient via the cross-entropy chain rule."""
    return _evaluate(score_set, config, GradientForm.AUTODIFF_CE.value, threads)


def evaluate_with_gradient(score_set: ScoreSet, config: LossConfig, threads: int = 1) -> LossResult:
    """Dispatch to the gradient form named in the config."""
    if config.gradient_form is GradientForm.AUTODIFF_CE:
        return gradient_autodiff_ce(score_set, config, threads)
    return gradient_error_driven(score_set, config, threads)
