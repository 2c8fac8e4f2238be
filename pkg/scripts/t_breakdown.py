"""Sweep t on the exact-solution ball and report where the iteration stops converging.

Prints the empirical t_max next to the volume-comparison bound for each n.
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from ricci_ma import exact
from ricci_ma.functionals import bishop_bound, mt_solvable_bound
from ricci_ma.iteration import empirical_t_max, t_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--step", type=float, default=0.1)
    ap.add_argument("--t-max", type=float, default=12.0)
    ap.add_argument("--max-iter", type=int, default=2000)
    ap.add_argument("--threads", type=int, default=4)
    ap.add_argument("--out", default="runs/t_breakdown.csv")
    args = ap.parse_args()
    ts = np.arange(1, int(round(args.t_max / args.step)) + 1) * args.step
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "t", "converged", "F", "E", "iterations", "reason"])
        for n in args.n:
            pts = t_sweep(n, exact.star_radius(n), ts, 1e-10, args.max_iter, 4096, args.threads)
            for p in pts:
                w.writerow([n, f"{p.t:.6g}", int(p.converged), p.F, p.E, p.iterations, p.reason])
            t_max = empirical_t_max(pts)
            first_fail = next((p for p in pts if not p.converged), None)
            print(f"n={n}: empirical t_max={t_max:.3g}  bishop={bishop_bound(n):.4f}  "
                  f"mt-range={mt_solvable_bound(n):.4f}")
            if first_fail:
                print(f"   first failure at t={first_fail.t:.3g}: {first_fail.reason[:90]}")


if __name__ == "__main__":
    main()
