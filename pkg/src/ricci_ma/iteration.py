"""Ricci inverse iteration on balls and the t-continuation sweep."""
from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import Diverged, NonMonotoneMass, OverflowRisk, SingularMass
from .functionals import energy, f_functional, f_functional_t
from .radial import (
    RadialGrid,
    RadialPotential,
    density_to_mass,
    ma_apply,
    ma_solve_dirichlet,
)

log = logging.getLogger(__name__)

DIVERGE_STREAK = 20
ENERGY_CAP = 1e3
MONOTONE_SLACK = 1e-10


@dataclass(frozen=True)
class StepRecord:
    j: int
    E: float
    F: float
    supDiff: float
    residual: float


@dataclass
class IterationTrace:
    """Per-step record of a fixed-point run.

    Record ``j`` describes the iterate ``phi_{j+1} = T(phi_j)``; the values
    for the initial datum are kept in ``E0``/``F0``. ``F`` is the functional
    matched to the run's ``t`` (``f_functional_t``), which is the plain ``F``
    when ``t = 1``.
    """

    t: float
    tol: float
    E0: float
    F0: float
    steps: list = field(default_factory=list)
    converged: bool = False
    C0: float = 0.0
    fixed_point_residual: float = float("nan")
    reason: str = ""
    diverge_streak: int = DIVERGE_STREAK
    energy_cap: float = ENERGY_CAP

    @property
    def iterations(self) -> int:
        return len(self.steps)

    @property
    def F_sequence(self) -> np.ndarray:
        return np.array([self.F0] + [s.F for s in self.steps])

    @property
    def E_sequence(self) -> np.ndarray:
        return np.array([self.E0] + [s.E for s in self.steps])

    @property
    def final_E(self) -> float:
        return self.steps[-1].E if self.steps else self.E0

    @property
    def final_F(self) -> float:
        return self.steps[-1].F if self.steps else self.F0

    def is_monotone(self, slack: float = MONOTONE_SLACK) -> bool:
        return bool(np.all(np.diff(self.F_sequence) >= -slack))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["j", "E", "F", "supDiff", "residual"])
            for s in self.steps:
                w.writerow([s.j] + [f"{x:.17g}" for x in (s.E, s.F, s.supDiff, s.residual)])

    @staticmethod
    def read_csv(path) -> list:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        return [
            StepRecord(int(r["j"]), float(r["E"]), float(r["F"]), float(r["supDiff"]), float(r["residual"]))
            for r in rows
        ]

    def summary(self, t_max: Optional[float] = None) -> dict:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "finalE": self.final_E,
            "finalF": self.final_F,
            "tMaxIfSweep": t_max,
            "t": self.t,
            "tol": self.tol,
            "C0": self.C0,
            "fixedPointResidual": self.fixed_point_residual,
            "divergeStreak": self.diverge_streak,
            "energyCap": self.energy_cap,
            "reason": self.reason,
        }

    def write_summary(self, path, t_max: Optional[float] = None) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary(t_max), fh, indent=2, sort_keys=True)


def ricci_step(phi: RadialPotential, t: float = 1.0) -> RadialPotential:
    """One application of T: solve ``(dd^c psi)^n = e^{-t phi} mu / Z`` with zero boundary data."""
    return ma_solve_dirichlet(density_to_mass(phi, t))


def ricci_iterate(
    phi0: RadialPotential,
    t: float = 1.0,
    tol: float = 1e-10,
    max_iter: int = 500,
    diverge_streak: int = DIVERGE_STREAK,
    energy_cap: float = ENERGY_CAP,
) -> tuple[RadialPotential, IterationTrace]:
    """Picard iteration of ``ricci_step`` until successive iterates agree to ``tol``.

    Raises ``Diverged`` when the step size grows for ``diverge_streak``
    consecutive steps, the energy exceeds ``energy_cap``, or an iterate stops
    being an admissible potential (mass collapsing onto the origin).
    """
    trace = IterationTrace(t, tol, energy(phi0), f_functional_t(phi0, t),
                           diverge_streak=diverge_streak, energy_cap=energy_cap)
    trace.C0 = float(np.max(-phi0.values))
    phi = phi0
    streak = 0
    prev_diff = np.inf
    for j in range(max_iter):
        try:
            rhs = density_to_mass(phi, t)
            new = ma_solve_dirichlet(rhs)
            residual = float(np.max(np.abs(ma_apply(new).values - rhs.values)))
            E, F = energy(new), f_functional_t(new, t)
        except (SingularMass, NonMonotoneMass, OverflowRisk) as exc:
            trace.reason = f"breakdown at step {j}: {exc}"
            raise Diverged(trace.reason, trace) from exc
        diff = new.sup_distance(phi)
        trace.steps.append(StepRecord(j, E, F, diff, residual))
        trace.C0 = max(trace.C0, float(np.max(-new.values)))
        phi = new
        if diff <= tol:
            trace.converged = True
            break
        streak = streak + 1 if diff > prev_diff else 0
        prev_diff = diff
        if streak >= diverge_streak or abs(E) > energy_cap:
            trace.reason = f"diverged at step {j}: supDiff={diff:.3g}, E={E:.3g}"
            raise Diverged(trace.reason, trace)
    if trace.converged:
        trace.fixed_point_residual = ricci_step(phi, t).sup_distance(phi)
    else:
        trace.reason = f"no convergence within {max_iter} iterations"
        log.info("t=%g: %s", t, trace.reason)
    return phi, trace


def initial_potential(grid: RadialGrid, kind: str = "zero") -> RadialPotential:
    if kind == "zero":
        return RadialPotential.zero(grid)
    if kind == "paraboloid":
        R = grid.R
        return RadialPotential.from_function(grid, lambda r: (r * r - R * R) / (2 * R * R))
    raise ValueError(f"unknown initial datum {kind!r}")


@dataclass(frozen=True)
class SweepPoint:
    t: float
    converged: bool
    F: float
    E: float
    iterations: int = 0
    reason: str = ""


def _sweep_one(grid, t, tol, max_iter):
    try:
        phi, trace = ricci_iterate(RadialPotential.zero(grid), t, tol, max_iter)
    except Diverged as exc:
        tr = exc.trace
        return SweepPoint(t, False, float("nan"), float("nan"), tr.iterations if tr else 0, str(exc))
    rep = f_functional(phi)
    return SweepPoint(t, trace.converged, rep.F, rep.E, trace.iterations, trace.reason)


def t_sweep(
    n: int,
    R: float,
    t_grid: Sequence[float],
    tol: float = 1e-10,
    max_iter: int = 500,
    num_nodes: int = 4096,
    threads: int = 1,
) -> list[SweepPoint]:
    """Solve ``(MA)_t`` independently (cold start from 0) for every t in the grid.

    Each point reports the plain ``F`` and ``E`` of its solution.
    """
    t_grid = [float(t) for t in t_grid]
    if any(t < 0 for t in t_grid) or any(b <= a for a, b in zip(t_grid, t_grid[1:])):
        raise ValueError("t grid must be increasing and nonnegative")
    grid = RadialGrid.uniform(n, R, num_nodes)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda t: _sweep_one(grid, t, tol, max_iter), t_grid))
    return [_sweep_one(grid, t, tol, max_iter) for t in t_grid]


def empirical_t_max(points: Sequence[SweepPoint]) -> Optional[float]:
    """Last t of the sweep before the first failure (None if the first t fails)."""
    t_max = None
    for p in points:
        if not p.converged:
            break
        t_max = p.t
    return t_max
