"""Run the standard parameter grids on one synthetic instance and print tables.

Four ablations, each a short gradient-descent run from the same starting
scores: sigmoid steepness lambda, ramp half-width delta (applied to the
smoothed ranks), valid-pair threshold T, and pair budget Q. Useful as a
quick eyeball check that the knobs move the loss in the expected
directions.

Usage:
    python3 scripts/run_parameter_grids.py [--seed 0] [--steps 50] [--lr 1.0]
"""

import argparse

from pairloss import (
    DistanceKind,
    DistanceSpec,
    FilterMode,
    FilterSpec,
    GeneratorSpec,
    LossConfig,
    PairBudget,
    descend_scores,
    generate_scores,
)

LAMBDA_GRID = (2.0, 4.0, 8.0, 16.0)
DELTA_GRID = (1.0, 0.5, 0.25, 0.125)
THRESHOLD_GRID = (0.0, 0.2, 0.25, 0.3, 0.5)
BUDGET_GRID = (10, 100, 1000, None)

HEADER = f"{'value':>10} {'loss[0]':>12} {'loss[T]':>12} {'AP[0]':>8} {'AP[T]':>8} {'pairs[0]':>9} {'pairs[T]':>9}"


def run_cell(score_set, config, steps, lr):
    trajectory = descend_scores(score_set, config, steps, lr)
    first, last = trajectory.records[0], trajectory.records[-1]
    return (
        f"{first.total_loss:>12.6f} {last.total_loss:>12.6f} "
        f"{first.ranking_ap:>8.4f} {last.ranking_ap:>8.4f} "
        f"{first.active_pairs:>9d} {last.active_pairs:>9d}"
    )


def sweep(title, score_set, values, make_config, steps, lr):
    print(f"\n== {title} ==")
    print(HEADER)
    for value in values:
        label = "unlimited" if value is None else f"{value:g}"
        print(f"{label:>10} {run_cell(score_set, make_config(value), steps, lr)}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--steps", type=int, default=50)
    parser.add_argument("--lr", type=float, default=1.0)
    parser.add_argument("--n-pos", type=int, default=50)
    parser.add_argument("--n-neg", type=int, default=500)
    args = parser.parse_args()

    spec = GeneratorSpec(seed=args.seed, n_pos=args.n_pos, n_neg=args.n_neg)
    score_set = generate_scores(spec)
    print(
        f"instance: {args.n_pos} positives, {args.n_neg} negatives, seed {args.seed}; "
        f"{args.steps} steps at lr {args.lr:g}"
    )

    sweep(
        "lambda (sigmoid steepness, cross-entropy distance)",
        score_set,
        LAMBDA_GRID,
        lambda lam: LossConfig(distance=DistanceSpec(kind=DistanceKind.CE_SIGMOID, lam=lam)),
        args.steps,
        args.lr,
    )
    sweep(
        "delta (ramp half-width for the smoothed ranks)",
        score_set,
        DELTA_GRID,
        lambda delta: LossConfig(
            distance=DistanceSpec(kind=DistanceKind.CE_SIGMOID, delta=delta),
            rank_delta=delta,
        ),
        args.steps,
        args.lr,
    )
    sweep(
        "T (valid-pair threshold, negative-count normalizer)",
        score_set,
        THRESHOLD_GRID,
        lambda threshold: LossConfig(
            distance=DistanceSpec(kind=DistanceKind.CE_SIGMOID),
            pair_filter=FilterSpec(mode=FilterMode.VALID_NEG_COUNT, threshold=threshold),
        ),
        args.steps,
        args.lr,
    )
    sweep(
        "Q (per-anchor pair budget)",
        score_set,
        BUDGET_GRID,
        lambda q: LossConfig(
            distance=DistanceSpec(kind=DistanceKind.CE_SIGMOID),
            budget=PairBudget(q),
        ),
        args.steps,
        args.lr,
    )


if __name__ == "__main__":
    main()
