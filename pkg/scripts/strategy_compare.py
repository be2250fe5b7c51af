"""Steepest versus random rotation descent on unregularised and regularised instances.

    python3 scripts/strategy_compare.py --trials 10
"""
import argparse
import time

import numpy as np

from regfact.descent import DescentConfig
from regfact.matrix_core import svd
from regfact.regularizers import regularizer
from regfact.rsvd import RsvdProblem, solve_rsvd


def run(A, k, lam, mu, strategy, seed, trials_per_iter):
    n, m = A.shape
    cfg = DescentConfig(strategy=strategy, seed=seed, random_trials_per_iter=trials_per_iter)
    prob = RsvdProblem(A, k, lam, mu, regularizer("second_difference", n),
                       regularizer("second_difference", m), cfg, init="random")
    start = time.perf_counter()
    sol = solve_rsvd(prob)
    return sol, time.perf_counter() - start


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--m", type=int, default=6)
    ap.add_argument("--rank", type=int, default=1)
    ap.add_argument("--lam", type=float, default=0.0)
    ap.add_argument("--mu", type=float, default=0.0)
    ap.add_argument("--random-trials-per-iter", type=int, default=256)
    args = ap.parse_args()

    g = np.random.default_rng(0)
    print(f"{'seed':>4} {'strategy':>9} {'psi':>14} {'iters':>6} {'evals':>7} {'secs':>6} {'|q.v1|-1':>9}")
    for seed in range(args.trials):
        A = g.standard_normal((args.n, args.m))
        v1 = svd(A).V[:, 0]
        for strategy in ("steepest", "random"):
            sol, secs = run(A, args.rank, args.lam, args.mu, strategy, seed, args.random_trials_per_iter)
            gap = abs(sol.Q[:, 0] @ v1) - 1
            print(f"{seed:>4} {strategy:>9} {sol.diagnostics['psi_final']:>14.8f} {sol.iterations:>6} "
                  f"{sol.diagnostics['evaluations']:>7} {secs:>6.2f} {gap:>9.1e}")


if __name__ == "__main__":
    main()
