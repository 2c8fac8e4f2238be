"""Radial reduction of the complex Monge-Ampere operator on balls in C^n.

With ``d^c = (1/2 pi i)(d - dbar)`` the Monge-Ampere mass of a radial
potential inside the ball of radius ``r`` is ``(r phi'(r))**n``, so that
``log|z|`` carries total mass one. The normalized Lebesgue measure of the
ball ``B_R`` is ``(r/R)**(2n)`` in cumulative form, which is why all measure
quadratures below run in the volume variable ``x = (r/R)**(2n)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    GridMismatch,
    InvalidGrid,
    InvalidPotential,
    NonMonotoneMass,
    OverflowRisk,
    SingularMass,
)

MIN_INTERVALS = 16
MASS_TOL = 1e-9
EXPONENT_CAP = 700.0


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Radii ``0 = r_0 < r_1 < ... < r_m = R`` on the ball ``B_R`` in C^n."""

    n: int
    R: float
    nodes: np.ndarray

    def __post_init__(self):
        nodes = _frozen(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if int(self.n) != self.n or self.n < 1:
            raise InvalidGrid(f"complex dimension must be an integer >= 1, got {self.n}")
        if not self.R > 0:
            raise InvalidGrid(f"radius must be positive, got {self.R}")
        if nodes.ndim != 1 or nodes.size - 1 < MIN_INTERVALS:
            raise InvalidGrid(f"need at least {MIN_INTERVALS} intervals, got {nodes.size - 1}")
        if nodes[0] != 0.0 or nodes[-1] != self.R:
            raise InvalidGrid("grid must start at exactly 0 and end at exactly R")
        if np.any(np.diff(nodes) <= 0):
            raise InvalidGrid("grid nodes must be strictly increasing")

    @classmethod
    def uniform(cls, n: int, R: float, num_nodes: int = 4096) -> "RadialGrid":
        nodes = np.linspace(0.0, R, num_nodes)
        nodes[-1] = R
        return cls(n, float(R), nodes)

    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def volume(self) -> np.ndarray:
        """Normalized Lebesgue mass ``(r/R)**(2n)`` of the ball of radius r."""
        return (self.nodes / self.R) ** (2 * self.n)

    @property
    def weights(self) -> np.ndarray:
        """Nodal trapezoid weights of the normalized measure; they sum to 1."""
        dx = np.diff(self.volume)
        w = np.zeros(self.size)
        w[:-1] += 0.5 * dx
        w[1:] += 0.5 * dx
        return w

    def same_as(self, other: "RadialGrid") -> bool:
        return (
            self is other
            or (self.n == other.n and self.R == other.R and np.array_equal(self.nodes, other.nodes))
        )


@dataclass(frozen=True, eq=False)
class RadialPotential:
    """Sampled radial candidate ``phi(r)`` with ``phi(R) = 0``."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.nodes.shape:
            raise InvalidPotential("values must match the grid")
        if not np.all(np.isfinite(values)):
            raise InvalidPotential("potential must be finite on the grid")
        scale = 1.0 + np.max(np.abs(values))
        if abs(values[-1]) > 1e-12 * scale:
            raise InvalidPotential(f"Dirichlet condition violated: phi(R) = {values[-1]}")
        values[-1] = 0.0
        if np.any(np.diff(values) < -1e-12 * scale):
            raise InvalidPotential("radial potential must be nondecreasing in r")
        object.__setattr__(self, "values", _frozen(values))

    @classmethod
    def from_function(cls, grid: RadialGrid, f: Callable[[np.ndarray], np.ndarray]) -> "RadialPotential":
        values = np.asarray(f(grid.nodes), dtype=float)
        values = values - values[-1]
        return cls(grid, values)

    @classmethod
    def zero(cls, grid: RadialGrid) -> "RadialPotential":
        return cls(grid, np.zeros(grid.size))

    def scaled(self, s: float) -> "RadialPotential":
        return RadialPotential(self.grid, s * self.values)

    def sup_distance(self, other: "RadialPotential") -> float:
        check_same_grid(self, other)
        return float(np.max(np.abs(self.values - other.values)))


@dataclass(frozen=True, eq=False)
class CumulativeMass:
    """Nondecreasing ``M(r)``: mass of a radial measure inside radius ``r``."""

    grid: RadialGrid
    values: np.ndarray = field()

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.nodes.shape:
            raise NonMonotoneMass("mass values must match the grid")
        scale = 1.0 + np.max(np.abs(values))
        if abs(values[0]) > MASS_TOL * scale:
            raise NonMonotoneMass(f"M(0) must vanish, got {values[0]}")
        if np.min(values) < -MASS_TOL * scale or np.any(np.diff(values) < -MASS_TOL * scale):
            raise NonMonotoneMass("cumulative mass must be nonnegative and nondecreasing")
        values[0] = 0.0
        object.__setattr__(self, "values", _frozen(values))

    @property
    def total(self) -> float:
        return float(self.values[-1])


def check_same_grid(a, b) -> None:
    if not a.grid.same_as(b.grid):
        raise GridMismatch("operands live on different grids")


def radial_slope(phi: RadialPotential) -> np.ndarray:
    """``r phi'(r)`` with central differences inside, 2nd-order one-sided at the ends."""
    r = phi.grid.nodes
    d = np.gradient(phi.values, r, edge_order=2)
    slope = r * d
    slope[0] = 0.0
    return slope


def ma_apply(phi: RadialPotential) -> CumulativeMass:
    """Cumulative Monge-Ampere mass ``(r phi'(r))**n`` of a radial potential."""
    n = phi.grid.n
    slope = radial_slope(phi)
    scale = 1.0 + np.max(np.abs(slope))
    if np.min(slope) < -MASS_TOL * scale:
        raise NonMonotoneMass("r phi'(r) < 0 somewhere: candidate is not plurisubharmonic")
    M = np.clip(slope, 0.0, None) ** n
    if np.any(np.diff(M) < -MASS_TOL * (1.0 + np.max(M))):
        raise NonMonotoneMass("(r phi')^n decreases: candidate is not plurisubharmonic")
    return CumulativeMass(phi.grid, M)


def ma_solve_dirichlet(M: CumulativeMass) -> RadialPotential:
    """Radial Dirichlet solve ``phi(r) = -int_r^R M(rho)^(1/n) drho / rho``.

    Composite trapezoid over the grid; the integrand is taken as 0 at the
    origin, which is its limit whenever ``M = O(rho^(2n))``.
    """
    grid = M.grid
    r = grid.nodes
    m = np.clip(M.values, 0.0, None)
    if m[1] > 1e-14 and m[1] > 0.5 * m[2]:
        # a regular mass scales like r^(2n) near 0, so M(r_1)/M(r_2) <= 1/4
        raise SingularMass("mass concentrates at the origin (atom); potential is unbounded")
    g = np.zeros_like(r)
    g[1:] = m[1:] ** (1.0 / grid.n) / r[1:]
    cells = 0.5 * (g[1:] + g[:-1]) * np.diff(r)
    values = np.zeros_like(r)
    values[:-1] = -np.cumsum(cells[::-1])[::-1]
    return RadialPotential(grid, values)


def _shifted_density(phi: RadialPotential, t: float, exponent_cap: float):
    if t < 0:
        raise ValueError("t must be nonnegative")
    v = phi.values
    if t * np.max(np.abs(v)) > exponent_cap:
        raise OverflowRisk(f"t*max|phi| = {t * np.max(np.abs(v)):.3g} exceeds exponent cap {exponent_cap}")
    lo = float(np.min(v))
    return np.exp(-t * (v - lo)), lo


def log_int_exp(phi: RadialPotential, t: float = 1.0, exponent_cap: float = EXPONENT_CAP) -> float:
    """``log int e^{-t phi} dmu`` for the normalized Lebesgue measure ``mu``."""
    f, lo = _shifted_density(phi, t, exponent_cap)
    return float(np.log(np.dot(phi.grid.weights, f)) - t * lo)


def density_to_mass(phi: RadialPotential, t: float = 1.0, exponent_cap: float = EXPONENT_CAP) -> CumulativeMass:
    """Cumulative form of the probability measure ``e^{-t phi} mu / int e^{-t phi} dmu``."""
    f, _ = _shifted_density(phi, t, exponent_cap)
    cells = 0.5 * (f[1:] + f[:-1]) * np.diff(phi.grid.volume)
    M = np.zeros_like(f)
    M[1:] = np.cumsum(cells)
    M /= M[-1]
    M[-1] = 1.0
    return CumulativeMass(phi.grid, M)
