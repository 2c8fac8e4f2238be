"""E along the Legendre geodesic from the uniform-mass potential to the exact solution.

Reports the deviation of E from its chord (should fall like ds^2) and the
largest second difference of F (should be <= 0).
"""
import argparse

import numpy as np

from ricci_ma import exact
from ricci_ma.geodesics import geodesic_path
from ricci_ma.plotting import emit_plot
from ricci_ma.radial import RadialGrid, RadialPotential


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--samples", type=int, default=16)
    ap.add_argument("--plot", default=None, help="optional SVG of E and F along the path")
    args = ap.parse_args()
    n, R = args.n, exact.star_radius(args.n)
    g = RadialGrid.uniform(n, R, 8192)
    phi0 = RadialPotential.from_function(g, exact.phi_unif(n, R))
    phi1 = RadialPotential.from_function(g, exact.phi_star(n))
    prev = None
    for nodes in (512, 1024, 2048, 4096, 8192):
        path = geodesic_path(phi0, phi1, args.samples, nodes)
        E, F = path.energies(), path.F_values()
        dev = float(np.max(np.abs(E - (E[0] + (E[-1] - E[0]) * path.t))))
        second = float(np.max(F[2:] - 2 * F[1:-1] + F[:-2]))
        ratio = f"{prev / dev:.2f}" if prev else "  - "
        print(f"nodes={nodes:5d}  E chord deviation={dev:.3e}  ratio={ratio}  max F''={second:.3e}")
        prev = dev
    if args.plot:
        emit_plot([("E", path.t.tolist(), E.tolist()), ("F", path.t.tolist(), F.tolist())], args.plot,
                  xlabel="t", ylabel="value")


if __name__ == "__main__":
    main()
