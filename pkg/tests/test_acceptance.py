"""Acceptance criteria 1-11, each at its stated tolerance.

Each test prints one ``criterion k: PASS|FAIL`` line (visible in ``pytest -v``
output) before asserting.
"""
import math
import time

import numpy as np
import pytest
from scipy.interpolate import CubicSpline
from scipy.special import jn_zeros

from ricci_ma import exact
from ricci_ma.functionals import (
    bishop_bound,
    capacity_sublevel_check,
    energy,
    f_functional,
    mt_fit,
    mt_solvable_bound,
    volume_capacity_check,
)
from ricci_ma.geodesics import check_energy_affine, check_f_concave, geodesic_path, uniqueness_experiment
from ricci_ma.iteration import empirical_t_max, ricci_iterate, ricci_step, t_sweep
from ricci_ma.planar import GridPotential2D, PlanarDomain, lambda1, liouville_iterate
from ricci_ma.radial import RadialGrid, RadialPotential


@pytest.fixture
def report(capsys):
    def _report(k, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return _report


def potential(n, R, f, nodes=4096):
    return RadialPotential.from_function(RadialGrid.uniform(n, R, nodes), f)


def test_criterion_01_exact_solution_recovery(report):
    lines, ok = [], True
    for n in (1, 2):
        R = exact.star_radius(n)
        grid = RadialGrid.uniform(n, R, 4096)
        t0 = time.perf_counter()
        phi, trace = ricci_iterate(RadialPotential.zero(grid), 1.0, 1e-10, 200)
        dt = time.perf_counter() - t0
        err = phi.sup_distance(RadialPotential.from_function(grid, exact.phi_star(n)))
        good = trace.converged and trace.iterations <= 200 and err <= 1e-6 and dt < 5.0
        ok &= good
        lines.append(f"n={n}: err={err:.2e} iters={trace.iterations} time={dt:.3f}s")
    assert report(1, ok, "; ".join(lines))


def test_criterion_02_first_iterate_identity(report):
    lines, ok = [], True
    for n in (1, 2, 3):
        R = exact.star_radius(n)
        grid = RadialGrid.uniform(n, R, 4096)
        t0 = time.perf_counter()
        step = ricci_step(RadialPotential.zero(grid), 1.0)
        dt = time.perf_counter() - t0
        err = step.sup_distance(RadialPotential.from_function(grid, exact.phi_unif(n, R)))
        ok &= err <= 1e-8 and dt < 1.0
        lines.append(f"n={n}: err={err:.1e} time={dt * 1e3:.1f}ms")
    assert report(2, ok, "; ".join(lines))


def test_criterion_03_functional_values(report):
    lines, ok = [], True
    for n in (1, 2, 3):
        e = abs(energy(potential(n, 0.7, exact.phi_unif(n, 0.7))) - exact.energy_unif(n))
        ok &= e <= 1e-8
        lines.append(f"E_unif n={n} err={e:.1e}")
    F_unif = f_functional(potential(1, 1.0, exact.phi_unif(1, 1.0))).F
    e = abs(F_unif - (-0.125 + math.log(2 * (math.sqrt(math.e) - 1))))
    ok &= e <= 1e-7
    lines.append(f"F_unif err={e:.1e}")
    F_star = f_functional(potential(1, exact.star_radius(1), exact.phi_star(1))).F
    e = abs(F_star - (-0.150728 + math.log(4 / 3)))
    ok &= e <= 1e-5
    lines.append(f"F_star err={e:.1e}")
    assert report(3, ok, "; ".join(lines))


def test_criterion_04_monotone_f(report):
    worst, runs, ok = np.inf, 0, True
    for n in (1, 2):
        for R in (0.3, exact.star_radius(n), 0.9):
            for t in (0.5, 1.0):
                _, trace = ricci_iterate(RadialPotential.zero(RadialGrid.uniform(n, R, 2048)), t, 1e-11, 500)
                if not trace.converged:
                    continue
                runs += 1
                d = float(np.min(np.diff(trace.F_sequence)))
                worst = min(worst, d)
                ok &= trace.is_monotone(1e-10)
    ok &= runs == 12
    assert report(4, ok, f"{runs} converged runs, min F_(j+1)-F_j = {worst:.2e}")


def test_criterion_05_moser_trudinger(report):
    n, R = 1, exact.star_radius(1)
    base = [potential(n, R, exact.phi_unif(n, R)), potential(n, R, exact.phi_star(n))]
    family = [b.scaled(s) for b in base for s in np.linspace(0.0, 8.0, 33)]
    C, verdicts = mt_fit(family, 0.9)
    min_slack = min(v.slack for v in verdicts)
    ok = math.isfinite(C) and all(v.holds for v in verdicts) and min_slack >= -1e-12
    assert report(5, ok, f"fitted C={C:.6f}, min slack={min_slack:.2e}, members={len(family)}")


def test_criterion_06_geodesic(report):
    n, R = 1, exact.star_radius(1)
    devs = []
    for nodes in (2048, 4096):
        p0 = potential(n, R, exact.phi_unif(n, R))
        p1 = potential(n, R, exact.phi_star(n))
        path = geodesic_path(p0, p1, 16, nodes)
        E = path.energies()
        devs.append(float(np.max(np.abs(E - (E[0] + (E[-1] - E[0]) * path.t)))))
        if nodes == 2048:
            endpoints = np.array_equal(path.samples[0].u, path.u0.u) and np.array_equal(path.samples[-1].u, path.u1.u)
            conc = check_f_concave(path, 1e-6)
            aff = check_energy_affine(path, 5e-4)
    ratio = devs[0] / devs[1]
    ok = endpoints and aff.holds and conc.holds and ratio >= 3.0
    assert report(6, ok, f"E chord dev={devs[0]:.2e} (ratio {ratio:.2f} on refinement), max F'' = {conc.lhs:.2e}")


def test_criterion_07_uniqueness(report):
    lines, ok = [], True
    for n, R, tol in ((1, exact.star_radius(1), 1e-7), (2, 0.4, 1e-6)):
        g = RadialGrid.uniform(n, R, 4096)
        starts = [
            RadialPotential.zero(g),
            RadialPotential.from_function(g, exact.phi_unif(n, R)),
            RadialPotential.from_function(g, exact.phi_star(n, R)).scaled(3.0),
        ]
        rep = uniqueness_experiment(n, R, starts, tol)
        ok &= rep.passed
        lines.append(f"n={n} R={R:.4f}: max dist={rep.max_distance:.1e}")
    assert report(7, ok, "; ".join(lines))


def _planar_vs_radial(res, radial_ref):
    R = exact.star_radius(1)
    d = PlanarDomain.from_json({"shape": "disc", "R": R, "resolution": res})
    u, trace = liouville_iterate(d, 1.0, 1e-11, 200)
    x, y = d.coords()
    return float(np.max(np.abs(u.values - radial_ref(np.hypot(x, y))))), trace


def test_criterion_08_planar_cross_validation(report):
    R = exact.star_radius(1)
    g = RadialGrid.uniform(1, R, 4096)
    phi, _ = ricci_iterate(RadialPotential.zero(g), 1.0, 1e-12, 200)
    ref = CubicSpline(g.nodes, phi.values)
    e1, _ = _planar_vs_radial(128, ref)
    e2, _ = _planar_vs_radial(256, ref)
    ok = e1 <= 1e-3 and e1 / e2 >= 3.5
    lines = [f"disc err h=R/128 {e1:.2e}, ratio at h/2 {e1 / e2:.2f}"]
    for desc in ({"shape": "square", "side": 1.0}, {"shape": "ellipse", "a": 0.5, "b": 0.3}):
        _, tr = liouville_iterate(PlanarDomain.from_json(desc | {"resolution": 64}), 1.0, 1e-10, 300)
        ok &= tr.converged and tr.is_monotone()
        lines.append(f"{desc['shape']}: converged={tr.converged} in {tr.iterations}, monotone={tr.is_monotone()}")
    assert report(8, ok, "; ".join(lines))


def test_criterion_09_spectral(report):
    j01 = jn_zeros(0, 1)[0]
    R = 1.0
    d = PlanarDomain.from_json({"shape": "disc", "R": R, "resolution": 128})
    x, y = d.coords()
    lam_const = lambda1(GridPotential2D(d, (x * x + y * y - R * R) / 2.0))
    target = j01 ** 2 / (2 * R * R)
    sig3 = float(f"{lam_const:.3g}") == float(f"{target:.3g}")
    ds = PlanarDomain.from_json({"shape": "disc", "R": exact.star_radius(1), "resolution": 128})
    u, _ = liouville_iterate(ds, 1.0, 1e-11, 200)
    lam_star = lambda1(u)
    ok = sig3 and abs(lam_const / target - 1) < 5e-4 and lam_star > 1.0
    assert report(9, ok, f"constant weight {lam_const:.6f} vs {target:.6f}; phi* metric {lam_star:.4f}")


def test_criterion_10_bounds(report):
    b = [bishop_bound(n) for n in (1, 2, 3)]
    ok = all(abs(x - y) < 5e-5 for x, y in zip(b, (4.0, 6.9282, 9.2832)))
    ok &= abs(mt_solvable_bound(1) - 16.0) < 1e-12
    step = 0.2
    pts = t_sweep(1, exact.star_radius(1), np.arange(1, 41) * step, 1e-10, 1000, 4096, threads=4)
    t_max = empirical_t_max(pts)
    ok &= t_max is not None and 1.0 <= t_max <= 4.0 + step
    assert report(10, ok, f"bishop={[round(x, 4) for x in b]}, mt=16, empirical t_max={t_max}")


def test_criterion_11_capacity(report):
    ok, worst = True, np.inf
    for n in (1, 2):
        R = exact.star_radius(n)
        for f in (exact.phi_star(n), exact.phi_unif(n, R)):
            phi = potential(n, R, f)
            for t in (0.05, 0.1, 0.3):
                v = capacity_sublevel_check(phi, t)
                ok &= v.holds
                worst = min(worst, v.slack)
    fits = []
    for n in (1, 2):
        v = volume_capacity_check(np.linspace(0.05, 0.95, 19), 2.0 * n, n)
        fits.append(v.fittedConstant)
        ok &= abs(v.fittedConstant - 1.0) <= 1e-12 and v.holds
    assert report(11, ok, f"min capacity slack={worst:.3e}; fitted C at gamma=2n: {fits}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
