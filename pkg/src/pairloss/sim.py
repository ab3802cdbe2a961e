"""Synthetic score generation, ranking AP, and a score-space training loop.

The simulator treats the scores themselves as the parameters: plain gradient
descent (no momentum) on the loss drives positive scores up and negative
scores down, which is the cheapest honest demonstration that the gradient
ranks. Determinism contract: scores come from numpy's PCG64 generator with
explicit seeding (positives drawn before negatives), so a (spec, config,
steps, lr) tuple reproduces bit-identical trajectories on any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .loss import LossResult, evaluate_with_gradient
from .types import (
    DivergenceError,
    Label,
    LossConfig,
    ScoreSet,
    UndefinedMetricError,
    ValidationError,
)


def _check_count(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ValidationError(f"{name} must be a nonnegative integer, got {value!r}")
    if value < 0:
        raise ValidationError(f"{name} must be >= 0, got {value}")
    return int(value)


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of the two-Gaussian synthetic score generator.

    Positives are drawn first from N(pos_mean, pos_std), then negatives from
    N(neg_mean, neg_std), using PCG64 seeded with `seed`. clamp, when given,
    clips all scores into [lo, hi].
    """

    seed: int = 0
    n_pos: int = 50
    n_neg: int = 500
    pos_mean: float = 0.6
    pos_std: float = 0.1
    neg_mean: float = 0.4
    neg_std: float = 0.1
    clamp: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)):
            raise ValidationError(f"seed must be an integer, got {self.seed!r}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "n_pos", _check_count("n_pos", self.n_pos))
        object.__setattr__(self, "n_neg", _check_count("n_neg", self.n_neg))
        for name in ("pos_mean", "pos_std", "neg_mean", "neg_std"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value!r}")
            if name.endswith("std") and value < 0:
                raise ValidationError(f"{name} must be >= 0, got {value}")
            object.__setattr__(self, name, value)
        if self.clamp is not None:
            lo, hi = (float(v) for v in self.clamp)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValidationError(f"clamp must be a finite [lo, hi] with lo < hi, got {self.clamp!r}")
            object.__setattr__(self, "clamp", (lo, hi))


@dataclass(frozen=True)
class TrajectoryRecord:
    """Metrics at one optimisation step (step 0 is the initial state)."""

    step: int
    total_loss: float
    ranking_ap: float
    gradient_norm: float
    active_pairs: int


@dataclass(frozen=True)
class Trajectory:
    """Per-step records plus the final score state.

    Always holds steps + 1 records: the initial state and one per update.
    """

    records: tuple[TrajectoryRecord, ...]
    final: ScoreSet

    @property
    def initial_loss(self) -> float:
        return self.records[0].total_loss

    @property
    def final_loss(self) -> float:
        return self.records[-1].total_loss

    @property
    def final_ap(self) -> float:
        return self.records[-1].ranking_ap


def generate_scores(spec: GeneratorSpec) -> ScoreSet:
    """Draw a labelled Gaussian score set: n_pos positives then n_neg negatives."""
    if not isinstance(spec, GeneratorSpec):
        raise ValidationError("spec must be a GeneratorSpec")
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    pos = spec.pos_mean + spec.pos_std * rng.standard_normal(spec.n_pos)
    neg = spec.neg_mean + spec.neg_std * rng.standard_normal(spec.n_neg)
    scores = np.concatenate([pos, neg])
    if spec.clamp is not None:
        lo, hi = spec.clamp
        scores = np.clip(scores, lo, hi)
    labels = np.concatenate(
        [
            np.full(spec.n_pos, Label.POSITIVE, dtype=np.int64),
            np.full(spec.n_neg, Label.NEGATIVE, dtype=np.int64),
        ]
    )
    return ScoreSet(scores=scores, labels=labels)


def ranking_ap(score_set: ScoreSet) -> float:
    """Score-level average precision: mean precision at each positive's rank.

    Entries are ranked by descending score with ties broken by ascending
    index; ignore-labelled entries take no part in the ranking. AP is 1
    exactly when every positive outscores every negative.
    """
    keep = score_set.labels != Label.IGNORE
    scores = score_set.scores[keep]
    labels = score_set.labels[keep]
    n_pos = int(np.count_nonzero(labels == Label.POSITIVE))
    if n_pos == 0:
        raise UndefinedMetricError("ranking AP needs at least one positive")
    # lexsort: last key is primary, so -scores first, original order for ties
    order = np.lexsort((np.arange(labels.size), -scores))
    hits = (labels[order] == Label.POSITIVE).astype(np.float64)
    cum_hits = np.cumsum(hits)
    ranks = np.flatnonzero(hits) + 1
    precisions = cum_hits[ranks - 1] / ranks
    return float(np.mean(precisions))


def simulate_training(
    spec: GeneratorSpec,
    config: LossConfig,
    steps: int,
    learning_rate: float,
    threads: int = 1,
) -> Trajectory:
    """Run `steps` gradient-descent updates on a freshly generated score set.

    Records metrics before the first update and after each one. Aborts with
    DivergenceError if the loss or the scores stop being finite. A zero
    learning rate is allowed and yields a flat trajectory.
    """
    if spec.n_pos < 1:
        raise ValidationError("simulation needs at least one positive")
    return descend_scores(generate_scores(spec), config, steps, learning_rate, threads)


def descend_scores(
    score_set: ScoreSet,
    config: LossConfig,
    steps: int,
    learning_rate: float,
    threads: int = 1,
) -> Trajectory:
    """Gradient descent on an existing score set; see simulate_training."""
    if isinstance(steps, bool) or not isinstance(steps, int):
        raise ValidationError(f"steps must be a positive integer, got {steps!r}")
    if steps < 1:
        raise ValidationError(f"steps must be >= 1, got {steps}")
    learning_rate = float(learning_rate)
    if not (math.isfinite(learning_rate) and learning_rate >= 0):
        raise ValidationError(f"learning_rate must be finite and >= 0, got {learning_rate!r}")
    if score_set.positive_indices.size < 1:
        raise ValidationError("descent needs at least one positive anchor")

    current = score_set
    records: list[TrajectoryRecord] = []
    for step in range(steps + 1):
        result: LossResult = evaluate_with_gradient(current, config, threads)
        if not math.isfinite(result.total_loss):
            raise DivergenceError(f"total loss became non-finite at step {step}")
        records.append(
            TrajectoryRecord(
                step=step,
                total_loss=result.total_loss,
                ranking_ap=ranking_ap(current),
                gradient_norm=float(np.linalg.norm(result.gradient)),
                active_pairs=result.active_pairs,
            )
        )
        if step == steps:
            break
        updated = current.scores - learning_rate * result.gradient
        try:
            current = current.with_scores(updated)
        except ValidationError as exc:
            raise DivergenceError(f"scores became non-finite at step {step + 1}") from exc
    return Trajectory(records=tuple(records), final=current)
