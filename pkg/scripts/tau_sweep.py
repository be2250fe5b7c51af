"""Sweep the noise level and compare truncated SVD with regularised SVD.

Prints one CSV row per (tau, seed) and a per-tau summary, e.g.

    python3 scripts/tau_sweep.py --taus 0.02 0.04 0.06 0.08 --seeds 5
"""
import argparse
import csv
import sys

import numpy as np

from regfact.descent import DescentConfig
from regfact.experiment import ExperimentSpec, run_denoise_demo


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--taus", type=float, nargs="+", default=[0.02, 0.04, 0.06, 0.08])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--n", type=int, default=60)
    ap.add_argument("--lam", type=float, default=1.5)
    ap.add_argument("--mu", type=float, default=1.5)
    ap.add_argument("--strategy", choices=("steepest", "random"), default="random")
    ap.add_argument("--max-iters", type=int, default=2000)
    args = ap.parse_args()

    out = csv.writer(sys.stdout)
    out.writerow(["tau", "seed", "err_svd", "err_rsvd", "iters", "converged"])
    summary = []
    for tau in args.taus:
        errs = []
        for seed in range(args.seeds):
            spec = ExperimentSpec(n=args.n, m=args.n, tau=tau, seed=seed)
            cfg = DescentConfig(strategy=args.strategy, max_iters=args.max_iters, seed=seed)
            m = run_denoise_demo(spec, lam=args.lam, mu=args.mu, descent=cfg)["metrics"]
            out.writerow([tau, seed, f"{m['err_svd']:.4f}", f"{m['err_rsvd']:.4f}", m["iters"], m["converged"]])
            errs.append((m["err_svd"], m["err_rsvd"]))
        e = np.array(errs)
        summary.append((tau, e[:, 0].mean(), e[:, 1].mean(), int(np.sum(e[:, 1] < e[:, 0]))))
    print(file=sys.stderr)
    for tau, svd_err, rsvd_err, wins in summary:
        print(f"tau={tau:<6} mean err svd {svd_err:.3f}  rsvd {rsvd_err:.3f}  rsvd wins {wins}/{args.seeds}",
              file=sys.stderr)


if __name__ == "__main__":
    main()
