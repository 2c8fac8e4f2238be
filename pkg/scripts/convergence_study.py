"""Grid refinement against the exact solution: radial nodes and planar spacing."""
import argparse
import csv
import time
from pathlib import Path

import numpy as np

from ricci_ma import exact
from ricci_ma.iteration import ricci_iterate
from ricci_ma.planar import PlanarDomain, liouville_iterate
from ricci_ma.radial import RadialGrid, RadialPotential


def radial_rows(n_values, sizes):
    for n in n_values:
        prev = None
        for m in sizes:
            g = RadialGrid.uniform(n, exact.star_radius(n), m)
            t0 = time.perf_counter()
            phi, trace = ricci_iterate(RadialPotential.zero(g), 1.0, 1e-13, 500)
            err = phi.sup_distance(RadialPotential.from_function(g, exact.phi_star(n)))
            yield {"kind": "radial", "n": n, "size": m, "error": err,
                   "ratio": prev / err if prev else float("nan"),
                   "iterations": trace.iterations, "seconds": time.perf_counter() - t0}
            prev = err


def planar_rows(resolutions):
    R = exact.star_radius(1)
    prev = None
    for res in resolutions:
        d = PlanarDomain.from_json({"shape": "disc", "R": R, "resolution": res})
        t0 = time.perf_counter()
        u, trace = liouville_iterate(d, 1.0, 1e-12, 200)
        x, y = d.coords()
        err = float(np.max(np.abs(u.values - exact.phi_star(1)(np.hypot(x, y)))))
        yield {"kind": "planar", "n": 1, "size": res, "error": err,
               "ratio": prev / err if prev else float("nan"),
               "iterations": trace.iterations, "seconds": time.perf_counter() - t0}
        prev = err


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/convergence.csv")
    ap.add_argument("--max-planar", type=int, default=128)
    args = ap.parse_args()
    rows = list(radial_rows((1, 2, 3), [256, 512, 1024, 2048, 4096, 8192]))
    rows += list(planar_rows([r for r in (16, 32, 64, 128, 256) if r <= args.max_planar]))
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    for r in rows:
        print(f"{r['kind']:7s} n={r['n']} size={r['size']:5d} err={r['error']:.3e} "
              f"ratio={r['ratio']:.2f} iters={r['iterations']} {r['seconds']:.2f}s")


if __name__ == "__main__":
    main()
