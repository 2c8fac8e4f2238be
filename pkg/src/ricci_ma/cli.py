"""Command-line front end.

Every subcommand builds a ``RunConfig`` and hands it to ``run``, which writes
``manifest.json`` before starting (status ``running``) and rewrites it when
the run ends, successfully or not.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, exact, geodesics, iteration, planar, radial
from .config import OUTPUT_ENV, RunConfig
from .errors import Diverged, InvalidConfig, IoFailure, RicciMAError, SolverStall
from .functionals import (
    SLACK_RTOL,
    bishop_bound,
    beta_constants,
    default_beta,
    f_functional,
    mt_fit,
    mt_solvable_bound,
)
from .io import fmt, read_json, read_radial_potential, write_json, write_radial_csv
from .plotting import emit_plot

log = logging.getLogger(__name__)

EXIT_OK, EXIT_INVALID, EXIT_DIVERGED, EXIT_STALL, EXIT_OTHER = 0, 2, 3, 4, 5
FLAGS = ("completed", "converged", "monotoneF", "checksPassed")


def tolerances() -> dict:
    return {
        "radial.massTol": radial.MASS_TOL,
        "radial.exponentCap": radial.EXPONENT_CAP,
        "radial.minIntervals": radial.MIN_INTERVALS,
        "functionals.slackRtol": SLACK_RTOL,
        "iteration.monotoneSlack": iteration.MONOTONE_SLACK,
        "iteration.divergeStreak": iteration.DIVERGE_STREAK,
        "iteration.energyCap": iteration.ENERGY_CAP,
        "geodesics.convexityTol": geodesics.CONVEXITY_TOL,
        "geodesics.tailMass": geodesics.TAIL_MASS,
        "planar.linearRtol": planar.LINEAR_RTOL,
    }


@dataclass
class RunManifest:
    config: dict
    version: str = __version__
    status: str = "running"
    exitCode: Optional[int] = None
    message: str = ""
    wallTime: float = 0.0
    tolerances: dict = field(default_factory=tolerances)
    acceptance: dict = field(default_factory=lambda: {k: False for k in FLAGS})
    summary: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)

    def write(self, out: Path) -> None:
        write_json(asdict(self), out / "manifest.json")


def _radius(cfg: RunConfig) -> float:
    return cfg.R if cfg.R is not None else exact.star_radius(cfg.n)


def _write_trace(trace, out: Path, man: RunManifest, t_max=None) -> None:
    trace.write_csv(out / "trace.csv")
    write_json(trace.summary(t_max), out / "summary.json")
    man.outputs += ["trace.csv", "summary.json"]


def _plot(cfg, man, out, name, series, **labels):
    if cfg.plots:
        emit_plot(series, out / name, **labels)
        man.outputs.append(name)


def _f_vs_j(trace):
    F = trace.F_sequence
    return [("F", list(range(F.size)), F.tolist())]


def _initial(cfg: RunConfig, grid: radial.RadialGrid) -> radial.RadialPotential:
    if cfg.phi0 in ("zero", "paraboloid"):
        return iteration.initial_potential(grid, cfg.phi0)
    phi = read_radial_potential(cfg.phi0, cfg.n)
    if not phi.grid.same_as(grid):
        raise InvalidConfig([f"phi0: grid in {cfg.phi0} does not match n, R and gridSize"])
    return phi


def _named_potential(label: str, grid: radial.RadialGrid) -> radial.RadialPotential:
    """``zero``, ``paraboloid[:s]``, ``unif[:s]``, ``star[:s]``; anything else is a CSV path."""
    name, _, scale = label.partition(":")
    funcs = {
        "zero": lambda r: np.zeros_like(r),
        "paraboloid": exact.phi_unif(grid.n, grid.R),
        "unif": exact.phi_unif(grid.n, grid.R),
        "star": exact.phi_star(grid.n, grid.R),
    }
    if name in funcs:
        phi = radial.RadialPotential.from_function(grid, funcs[name])
        return phi.scaled(float(scale)) if scale else phi
    return read_radial_potential(label, grid.n)


def _mode_radial(cfg, out, man):
    grid = radial.RadialGrid.uniform(cfg.n, _radius(cfg), cfg.grid)
    phi, trace = iteration.ricci_iterate(_initial(cfg, grid), cfg.t, cfg.tol, cfg.maxIter)
    write_radial_csv(phi, out / "solution.csv")
    man.outputs.append("solution.csv")
    _write_trace(trace, out, man)
    man.summary = trace.summary()
    if cfg.t == 1.0:
        ref = radial.RadialPotential.from_function(grid, exact.phi_star(cfg.n, grid.R))
        man.summary["supErrorVsExact"] = phi.sup_distance(ref)
    man.acceptance.update(converged=trace.converged, monotoneF=trace.is_monotone(),
                          checksPassed=trace.converged and trace.is_monotone())
    _plot(cfg, man, out, "phi_vs_r.svg", [("phi", grid.nodes.tolist(), phi.values.tolist())],
          xlabel="r", ylabel="phi")
    _plot(cfg, man, out, "F_vs_j.svg", _f_vs_j(trace), xlabel="j", ylabel="F")
    return trace.converged


def _planar_domain(cfg) -> planar.PlanarDomain:
    desc = dict(cfg.domain)
    if cfg.gridSize is not None and "h" not in desc and "resolution" not in desc:
        desc["resolution"] = cfg.gridSize
    return planar.PlanarDomain.from_json(desc)


def _mode_planar(cfg, out, man):
    domain = _planar_domain(cfg)
    u, trace = planar.liouville_iterate(domain, cfg.t, cfg.tol, cfg.maxIter)
    u.write_csv(out / "solution.csv")
    write_json(domain.to_json(), out / "domain.json")
    man.outputs += ["solution.csv", "domain.json"]
    _write_trace(trace, out, man)
    man.summary = trace.summary()
    man.summary.update(area=domain.area, interiorNodes=domain.size, h=domain.h)
    man.acceptance.update(converged=trace.converged, monotoneF=trace.is_monotone(),
                          checksPassed=trace.converged and trace.is_monotone())
    _plot(cfg, man, out, "F_vs_j.svg", _f_vs_j(trace), xlabel="j", ylabel="F")
    return trace.converged


def _mode_sweep(cfg, out, man):
    pts = iteration.t_sweep(cfg.n, _radius(cfg), cfg.tGrid, cfg.tol, cfg.maxIter, cfg.grid, cfg.threadCount)
    t_max = iteration.empirical_t_max(pts)
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "converged", "F", "E", "iterations"])
        for p in pts:
            w.writerow([fmt(p.t), int(p.converged), fmt(p.F), fmt(p.E), p.iterations])
    man.outputs.append("sweep.csv")
    man.summary = {"tMaxIfSweep": t_max, "bishop": bishop_bound(cfg.n),
                   "points": [asdict(p) for p in pts]}
    write_json(man.summary, out / "summary.json")
    man.outputs.append("summary.json")
    ok = [p for p in pts if p.converged]
    _plot(cfg, man, out, "F_vs_t.svg", [("F", [p.t for p in ok], [p.F for p in ok])], xlabel="t", ylabel="F")
    man.acceptance.update(converged=t_max is not None, monotoneF=True,
                          checksPassed=t_max is not None and t_max <= bishop_bound(cfg.n) + 1e-12)
    return True


def _mode_geodesic(cfg, out, man):
    R = _radius(cfg)
    grid = None
    for label in (cfg.source, cfg.target):
        if label.partition(":")[0] not in ("zero", "paraboloid", "unif", "star"):
            grid = read_radial_potential(label, cfg.n).grid
            break
    grid = grid or radial.RadialGrid.uniform(cfg.n, R, 4096)
    phi0, phi1 = _named_potential(cfg.source, grid), _named_potential(cfg.target, grid)
    path = geodesics.geodesic_path(phi0, phi1, cfg.samples, cfg.grid)
    path.write_csv(out / "path.csv")
    man.outputs.append("path.csv")
    aff = geodesics.check_energy_affine(path)
    conc = geodesics.check_f_concave(path)
    E, F = path.energies(), path.F_values()
    man.summary = {"t": path.t.tolist(), "E": E.tolist(), "F": F.tolist(),
                   "energyAffine": aff.to_json(), "fConcave": conc.to_json(),
                   "energyAffineHolds": aff.holds, "fConcaveHolds": conc.holds}
    write_json(man.summary, out / "summary.json")
    man.outputs.append("summary.json")
    _plot(cfg, man, out, "E_F_vs_t.svg", [("E", path.t.tolist(), E.tolist()), ("F", path.t.tolist(), F.tolist())],
          xlabel="t", ylabel="value")
    man.acceptance.update(converged=True, monotoneF=True, checksPassed=aff.holds and conc.holds)
    return True


def _mode_mt(cfg, out, man):
    grid = radial.RadialGrid.uniform(cfg.n, _radius(cfg), cfg.grid)
    beta = cfg.beta if cfg.beta is not None else default_beta(cfg.n)
    members = []
    for kind in cfg.family:
        base = _named_potential(kind, grid)
        for s in np.linspace(0.0, cfg.sMax, cfg.familySize):
            members.append((kind, float(s), base.scaled(float(s))))
    C, verdicts = mt_fit([m[2] for m in members], beta)
    with open(out / "mt.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["kind", "s", "lhs", "rhs", "slack", "holds"])
        for (kind, s, _), v in zip(members, verdicts):
            w.writerow([kind, fmt(s), fmt(v.lhs), fmt(v.rhs), fmt(v.slack), int(v.holds)])
    holds = all(v.holds for v in verdicts)
    man.summary = {"beta": beta, "fittedConstant": C, "allHold": holds,
                   "minSlack": min(v.slack for v in verdicts)}
    write_json(man.summary, out / "summary.json")
    man.outputs += ["mt.csv", "summary.json"]
    man.acceptance.update(converged=True, monotoneF=True, checksPassed=holds and math.isfinite(C))
    return True


def _mode_bounds(cfg, out, man):
    man.summary = {"bishop": bishop_bound(cfg.n), "mtBound": mt_solvable_bound(cfg.n),
                   "betaPrime": beta_constants(cfg.n, 2.0 * cfg.n, 1.0)}
    write_json(man.summary, out / "summary.json")
    man.outputs.append("summary.json")
    man.acceptance.update(converged=True, monotoneF=True, checksPassed=True)
    return True


def _mode_lambda1(cfg, out, man):
    domain = _planar_domain(cfg)
    if cfg.solution:
        u = planar.GridPotential2D.read_csv(cfg.solution, domain)
        converged = True
    else:
        u, trace = planar.liouville_iterate(domain, cfg.t, cfg.tol, cfg.maxIter)
        converged = trace.converged
    lam = planar.lambda1(u)
    man.summary = {"lambda1": lam, "aboveOne": lam > 1.0}
    write_json(man.summary, out / "summary.json")
    man.outputs.append("summary.json")
    man.acceptance.update(converged=converged, monotoneF=True, checksPassed=lam > 1.0)
    return converged


def _mode_uniqueness(cfg, out, man):
    R = _radius(cfg)
    grid = radial.RadialGrid.uniform(cfg.n, R, cfg.grid)
    starts = [_named_potential(s, grid) for s in cfg.starts]
    tol = 1e-7 if cfg.n == 1 else 1e-6
    rep = geodesics.uniqueness_experiment(cfg.n, R, starts, tol, min(cfg.tol, 1e-12), cfg.maxIter)
    for k, phi in enumerate(rep.limits):
        write_radial_csv(phi, out / f"limit_{k}.csv")
        man.outputs.append(f"limit_{k}.csv")
    man.summary = rep.to_json() | {"starts": list(cfg.starts)}
    write_json(man.summary, out / "summary.json")
    man.outputs.append("summary.json")
    man.acceptance.update(converged=True, monotoneF=True, checksPassed=rep.passed)
    return True


HANDLERS = {
    "radial": _mode_radial,
    "planar": _mode_planar,
    "sweep-t": _mode_sweep,
    "geodesic": _mode_geodesic,
    "mt-scan": _mode_mt,
    "bounds": _mode_bounds,
    "lambda1": _mode_lambda1,
    "uniqueness": _mode_uniqueness,
}


def run(config: RunConfig) -> RunManifest:
    """Validate, execute and record one run. Raises only ``InvalidConfig`` and ``IoFailure``."""
    config.validate()
    out = config.out
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create {out}: {exc}") from exc
    man = RunManifest(config.to_json())
    man.write(out)
    start = time.perf_counter()
    try:
        converged = HANDLERS[config.mode](config, out, man)
        man.acceptance["completed"] = True
        man.status, man.exitCode = ("ok", EXIT_OK) if converged else ("not-converged", EXIT_STALL)
    except Diverged as exc:
        if exc.trace is not None:
            _write_trace(exc.trace, out, man)
        man.status, man.exitCode, man.message = "diverged", EXIT_DIVERGED, str(exc)
    except SolverStall as exc:
        man.status, man.exitCode, man.message = "stalled", EXIT_STALL, str(exc)
    except InvalidConfig as exc:
        man.status, man.exitCode, man.message = "invalid-config", EXIT_INVALID, str(exc)
    except RicciMAError as exc:
        man.status, man.exitCode, man.message = "error", EXIT_OTHER, str(exc)
    man.wallTime = time.perf_counter() - start
    man.write(out)
    return man


def _common(p: argparse.ArgumentParser, grid_help: str = "grid size") -> None:
    p.add_argument("--n", type=int, default=1, help="complex dimension")
    p.add_argument("--R", type=float, default=None, help="ball radius (default 1/sqrt(2n+1))")
    p.add_argument("--grid", type=int, default=None, help=grid_help)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--out", default=None, help=f"output directory (default ${OUTPUT_ENV}/<mode> or runs/<mode>)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--no-plots", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ricci-ma", description="Radial and planar Ricci iteration experiments.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a JSON config file")
    p.add_argument("config")

    p = sub.add_parser("solve-radial", help="Ricci iteration on a ball")
    _common(p, "radial nodes")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--phi0", default="zero", help="zero, paraboloid or a CSV path")

    p = sub.add_parser("solve-planar", help="Liouville iteration on a planar domain")
    _common(p, "nodes per radius / half-side")
    p.add_argument("--domain", required=True, help="domain JSON file")
    p.add_argument("--t", type=float, default=1.0)

    p = sub.add_parser("sweep-t", help="independent solves over a t grid")
    _common(p, "radial nodes")
    p.add_argument("--t-min", type=float, default=0.2)
    p.add_argument("--t-max", type=float, default=8.0)
    p.add_argument("--steps", type=int, default=40)

    p = sub.add_parser("geodesic", help="Legendre geodesic between two radial potentials")
    _common(p, "s-nodes")
    p.add_argument("--from", dest="source", required=True, help="unif, star, paraboloid:s or CSV path")
    p.add_argument("--to", dest="target", required=True)
    p.add_argument("--samples", type=int, default=16)

    p = sub.add_parser("mt-scan", help="fit the Moser-Trudinger constant over scaled families")
    _common(p, "radial nodes")
    p.add_argument("--family", default="unif,star")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--s-max", type=float, default=8.0)
    p.add_argument("--count", type=int, default=33)

    p = sub.add_parser("bounds", help="Bishop and Moser-Trudinger bounds on t")
    _common(p)

    p = sub.add_parser("lambda1", help="first eigenvalue of a planar solution metric")
    _common(p, "nodes per radius / half-side")
    p.add_argument("--domain", required=True, help="domain JSON file")
    p.add_argument("--solution", default=None, help="field CSV (x,y,value); solved if omitted")
    p.add_argument("--t", type=float, default=1.0)

    p = sub.add_parser("uniqueness", help="compare limits from several starts")
    _common(p, "radial nodes")
    p.add_argument("--starts", default="zero,paraboloid,paraboloid:3")
    return ap


def config_from_args(args) -> RunConfig:
    if args.command == "run":
        return RunConfig.from_json_file(args.config)
    mode = {"solve-radial": "radial", "solve-planar": "planar"}.get(args.command, args.command)
    kw = dict(mode=mode, n=args.n, R=args.R, gridSize=args.grid, tol=args.tol, maxIter=args.max_iter,
              outputDir=args.out, threadCount=args.threads, plots=not args.no_plots)
    if hasattr(args, "t"):
        kw["t"] = args.t
    if mode == "radial":
        kw["phi0"] = args.phi0
    if mode in ("planar", "lambda1"):
        kw["domain"] = read_json(args.domain)
    if mode == "lambda1":
        kw["solution"] = args.solution
    if mode == "sweep-t":
        if args.steps < 1:
            raise InvalidConfig(["steps: must be positive"])
        kw["tGrid"] = np.linspace(args.t_min, args.t_max, args.steps + 1).tolist()
    if mode == "geodesic":
        kw.update(source=args.source, target=args.target, samples=args.samples)
    if mode == "mt-scan":
        kw.update(family=[s for s in args.family.split(",") if s], beta=args.beta, sMax=args.s_max,
                  familySize=args.count)
    if mode == "uniqueness":
        kw["starts"] = [s for s in args.starts.split(",") if s]
    return RunConfig(**kw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        man = run(config_from_args(args))
    except InvalidConfig as exc:
        print("invalid configuration:", file=sys.stderr)
        for prob in exc.problems:
            print(f"  - {prob}", file=sys.stderr)
        return EXIT_INVALID
    except IoFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER
    print(json.dumps({"status": man.status, "exitCode": man.exitCode, "summary": _short(man.summary)},
                     sort_keys=True, default=str))
    if man.message:
        print(man.message, file=sys.stderr)
    return man.exitCode


def _short(summary: dict) -> dict:
    return {k: v for k, v in summary.items() if not isinstance(v, (list, dict))}


if __name__ == "__main__":
    sys.exit(main())
