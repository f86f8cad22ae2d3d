#!/usr/bin/env python
"""Coverage contrast on the unit-effects DGP.

Compares the credible/confidence intervals of the Bayesian bootstrap, the
pigeonhole bootstrap and the naive dyad-robust sandwich against the known
mean of a dyadic DGP with additive unit effects, and prints a coverage
table. At the default settings the naive intervals undercover severely
while both bootstrap schemes sit near the nominal level.

Usage: python scripts/coverage_experiment.py [--n 40] [--reps 500] [--draws 500] [--seed 2024]
"""

import argparse
import sys
import time

import polyboot as pb


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=40, help="number of units")
    ap.add_argument("--reps", type=int, default=500, help="Monte Carlo replications")
    ap.add_argument("--draws", type=int, default=500, help="bootstrap draws per replication")
    ap.add_argument("--level", type=float, default=0.95)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--sigma-c", type=float, default=1.0, help="unit-effect scale")
    ap.add_argument("--sigma-eps", type=float, default=0.3, help="idiosyncratic noise scale")
    args = ap.parse_args()

    config = pb.CoverageConfig(
        estimator=pb.EstimatorSpec(kind="mean", column="y"),
        methods=("bayes", "pigeonhole", "naive"),
        n_replications=args.reps,
        n_bootstrap=args.draws,
        level=args.level,
        seed=args.seed,
        dgp=pb.mean_unit_effects_dgp(args.n, args.sigma_c, args.sigma_eps),
    )

    started = time.time()
    report = pb.run_coverage(
        config,
        progress=lambda done, total: print(f"\rreplication {done}/{total}", end="", file=sys.stderr),
    )
    print(file=sys.stderr)

    print(f"n={args.n}  R={args.reps}  B={args.draws}  nominal={args.level:.0%}  "
          f"({time.time() - started:.0f}s)")
    print(f"{'method':<12} {'coverage':>9} {'mean width':>11} {'failures':>9}")
    for m in report.methods:
        print(f"{m.method:<12} {m.coverage:>9.3f} {m.mean_width:>11.3f} {m.n_failures:>9d}")


if __name__ == "__main__":
    main()
