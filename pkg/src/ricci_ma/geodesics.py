"""Geodesics between S^1-invariant radial potentials.

A radial psh potential is a convex nondecreasing function ``u(s)`` of
``s = log r``. For such data the homogeneous Monge-Ampere equation on
``Omega x A`` linearizes under the Legendre transform in ``s``: the geodesic
is ``u_t = (1-t) u_0^* + t u_1^*`` transformed back.

All transforms here are exact for the piecewise-linear interpolants of the
samples, which keeps endpoint recovery exact and the E-affinity/F-concavity
checks free of dual aliasing.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import NonConvexProfile
from .functionals import InequalityVerdict
from .iteration import ricci_iterate
from .radial import RadialPotential, check_same_grid

CONVEXITY_TOL = 1e-10
TAIL_MASS = 1e-12
DUAL_DENSITY = 4


def default_s_min(n: int, R: float) -> float:
    """Window start below which a bounded potential carries mass < 1e-12."""
    return math.log(R) + math.log(TAIL_MASS) / (2 * n) - 0.5


@dataclass(frozen=True, eq=False)
class SLogProfile:
    """Samples ``u_i = phi(e^{s_i})`` on a uniform grid in ``s`` ending at ``log R``."""

    n: int
    R: float
    s: np.ndarray
    u: np.ndarray
    tailSlope: float = 0.0

    def __post_init__(self):
        s = np.array(self.s, dtype=float)
        u = np.array(self.u, dtype=float)
        if s.shape != u.shape or s.size < 3:
            raise ValueError("profile needs matching s/u arrays with at least 3 nodes")
        if abs(u[-1]) > 1e-12 * (1 + np.max(np.abs(u))):
            raise ValueError("profile must vanish at s = log R")
        u[-1] = 0.0
        for a in (s, u):
            a.setflags(write=False)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "u", u)
        if self.tailSlope < 0 or self.tailSlope > self.chord_slopes[0] + CONVEXITY_TOL:
            raise ValueError("tail slope must lie in [0, u'(sMin)]")

    @property
    def sMin(self) -> float:
        return float(self.s[0])

    @property
    def sMax(self) -> float:
        return float(self.s[-1])

    @property
    def chord_slopes(self) -> np.ndarray:
        return np.diff(self.u) / np.diff(self.s)

    def check_convex(self, tol: float = CONVEXITY_TOL) -> None:
        c = self.chord_slopes
        scale = tol * (1.0 + np.max(np.abs(c)))
        if np.any(np.diff(c) < -scale):
            raise NonConvexProfile("profile is not convex in s = log r")
        if c[0] < -scale:
            raise NonConvexProfile("profile is decreasing in s = log r")

    @classmethod
    def from_function(
        cls, n: int, R: float, f: Callable, num_nodes: int = 2048, s_min: Optional[float] = None
    ) -> "SLogProfile":
        """Sample a radial potential given as a function of ``r``."""
        s_min = default_s_min(n, R) if s_min is None else s_min
        s = np.linspace(s_min, math.log(R), num_nodes)
        u = np.asarray(f(np.exp(s)), dtype=float)
        u = u - float(f(np.array([R]))[0])
        prof = cls(n, R, s, u, 0.0)
        return cls(n, R, s, u, max(float(prof.chord_slopes[0]), 0.0))

    @classmethod
    def from_radial(cls, phi: RadialPotential, num_nodes: int = 2048, s_min: Optional[float] = None):
        """Resample a gridded radial potential (cubic spline in ``r^2``, phi is even in r)."""
        g = phi.grid
        spline = CubicSpline(g.nodes ** 2, phi.values)
        return cls.from_function(g.n, g.R, lambda r: spline(np.asarray(r) ** 2), num_nodes, s_min)

    def with_values(self, u: np.ndarray) -> "SLogProfile":
        prof = SLogProfile(self.n, self.R, self.s, u, 0.0)
        return SLogProfile(self.n, self.R, self.s, u, max(float(prof.chord_slopes[0]), 0.0))

    def radial_values(self, r: np.ndarray) -> np.ndarray:
        """Evaluate at radii; constant continuation below ``e^{sMin}`` (mass < 1e-12)."""
        r = np.asarray(r, dtype=float)
        s = np.log(np.maximum(r, np.exp(self.sMin)))
        return np.interp(s, self.s, self.u)

    def mass(self) -> np.ndarray:
        """Monge-Ampere mass ``u'(s)^n`` inside ``e^s``."""
        d = np.gradient(self.u, self.s, edge_order=2)
        return np.clip(d, 0.0, None) ** self.n

    def energy(self) -> float:
        """Stieltjes energy ``(1/(n+1)) int u dM``, including the tail below sMin."""
        M = self.mass()
        u = self.u
        body = np.sum(0.5 * (u[1:] + u[:-1]) * np.diff(M))
        return float((body + u[0] * M[0]) / (self.n + 1))

    def log_int_exp(self) -> float:
        """``log int e^{-u} dmu``: trapezoid in the volume variable plus the flat tail."""
        x = np.exp(2 * self.n * (self.s - self.sMax))
        lo = float(np.min(self.u))
        f = np.exp(-(self.u - lo))
        total = np.sum(0.5 * (f[1:] + f[:-1]) * np.diff(x)) + f[0] * x[0]
        return float(np.log(total) - lo)

    def F(self) -> float:
        return self.energy() + self.log_int_exp()


@dataclass(frozen=True, eq=False)
class DualProfile:
    """Legendre transform ``u^*(p) = sup_s (p s - u(s))`` sampled at slopes ``p``."""

    p: np.ndarray
    values: np.ndarray

    def __call__(self, p) -> np.ndarray:
        return np.interp(p, self.p, self.values)


def _legendre_sorted(x: np.ndarray, y: np.ndarray, q: np.ndarray) -> np.ndarray:
    """``max_i (q x_i - y_i)`` for convex samples ``y(x)``, via the chord-slope bracket."""
    c = np.diff(y) / np.diff(x)
    c = np.maximum.accumulate(c)  # guard round-off; convexity is checked by the caller
    idx = np.searchsorted(c, q, side="left")
    return q * x[idx] - y[idx]


def slope_grid(profiles: Sequence[SLogProfile], density: int = DUAL_DENSITY) -> np.ndarray:
    """Uniform slopes on ``[0, p_max]`` merged with the chord slopes of every profile.

    Including the chord slopes makes the piecewise-linear duals exact, so the
    biconjugate reproduces each endpoint at its nodes.
    """
    pieces = [np.clip(pr.chord_slopes, 0.0, None) for pr in profiles]
    p_max = max(float(np.max(c)) for c in pieces)
    num = density * max(pr.s.size for pr in profiles)
    p = np.unique(np.concatenate([np.linspace(0.0, p_max, num)] + pieces))
    # near-coincident slopes make the dual chord slopes pure round-off
    keep = np.concatenate([[True], np.diff(p) > 1e-12 * p_max])
    keep[-1] = True
    p = p[keep]
    if p.size > 2 and p[-1] - p[-2] <= 1e-12 * p_max:
        p = np.delete(p, -2)
    return p


def legendre(u: SLogProfile, p: Optional[np.ndarray] = None) -> DualProfile:
    """Discrete Legendre transform of a convex profile over its window."""
    u.check_convex()
    if p is None:
        p = slope_grid([u])
    return DualProfile(p, _legendre_sorted(u.s, u.u, np.asarray(p, dtype=float)))


def inverse_legendre(dual: DualProfile, s: np.ndarray) -> np.ndarray:
    """``max_k (p_k s - u^*(p_k))`` evaluated at the points ``s``."""
    return _legendre_sorted(dual.p, dual.values, np.asarray(s, dtype=float))


def biconjugate(u: SLogProfile, p: Optional[np.ndarray] = None) -> SLogProfile:
    return u.with_values(inverse_legendre(legendre(u, p), u.s))


@dataclass(frozen=True, eq=False)
class GeodesicPath:
    u0: SLogProfile
    u1: SLogProfile
    t: np.ndarray
    samples: tuple

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "s", "u"])
            for t, prof in zip(self.t, self.samples):
                for s, u in zip(prof.s, prof.u):
                    w.writerow([f"{t:.17g}", f"{s:.17g}", f"{u:.17g}"])

    def energies(self) -> np.ndarray:
        return np.array([pr.energy() for pr in self.samples])

    def F_values(self) -> np.ndarray:
        return np.array([pr.F() for pr in self.samples])

    def reversed(self) -> "GeodesicPath":
        return GeodesicPath(self.u1, self.u0, 1.0 - self.t[::-1], tuple(self.samples[::-1]))


def geodesic_between_profiles(u0: SLogProfile, u1: SLogProfile, K: int = 16) -> GeodesicPath:
    if u0.n != u1.n or u0.R != u1.R or not np.array_equal(u0.s, u1.s):
        raise ValueError("endpoints must share n, R and the s-grid")
    if K < 1:
        raise ValueError("need K >= 1")
    p = slope_grid([u0, u1])
    d0, d1 = legendre(u0, p), legendre(u1, p)
    ts = np.linspace(0.0, 1.0, K + 1)
    samples = [u0]
    for t in ts[1:-1]:
        dual = DualProfile(p, (1.0 - t) * d0.values + t * d1.values)
        samples.append(u0.with_values(inverse_legendre(dual, u0.s)))
    samples.append(u1)
    return GeodesicPath(u0, u1, ts, tuple(samples))


def geodesic_path(phi0: RadialPotential, phi1: RadialPotential, K: int = 16, num_nodes: int = 2048) -> GeodesicPath:
    """Geodesic joining two radial potentials on the same ball."""
    check_same_grid(phi0, phi1)
    s_min = default_s_min(phi0.grid.n, phi0.grid.R)
    u0 = SLogProfile.from_radial(phi0, num_nodes, s_min)
    u1 = SLogProfile.from_radial(phi1, num_nodes, s_min)
    return geodesic_between_profiles(u0, u1, K)


def affine_tolerance(path: GeodesicPath) -> float:
    """``10 ds^2``: about 5e-4 for the default 2048-node window at n = 1.

    The transform is exact at the nodes, so the only deviation is the
    second-order quadrature error of the energy.
    """
    ds = float(path.u0.s[1] - path.u0.s[0])
    return 10.0 * ds * ds


def check_energy_affine(path: GeodesicPath, tol: Optional[float] = None) -> InequalityVerdict:
    E = path.energies()
    chord = E[0] + (E[-1] - E[0]) * path.t
    dev = float(np.max(np.abs(E - chord)))
    return InequalityVerdict.compare(dev, affine_tolerance(path) if tol is None else tol, tol=0.0)


def check_f_concave(path: GeodesicPath, tol: float = 1e-6) -> InequalityVerdict:
    if path.t.size < 5:
        raise ValueError("concavity check needs K >= 4")
    F = path.F_values()
    second = F[2:] - 2.0 * F[1:-1] + F[:-2]
    return InequalityVerdict.compare(float(np.max(second)), tol, tol=0.0)


@dataclass(frozen=True)
class UniquenessReport:
    max_distance: float
    tol: float
    passed: bool
    limits: tuple
    iterations: tuple

    def to_json(self) -> dict:
        return {
            "maxPairwiseSupDistance": self.max_distance,
            "tol": self.tol,
            "passed": self.passed,
            "iterations": list(self.iterations),
        }


def uniqueness_experiment(
    n: int,
    R: float,
    starts: Sequence[RadialPotential],
    tol: float = 1e-7,
    iter_tol: float = 1e-12,
    max_iter: int = 500,
) -> UniquenessReport:
    """Run the Ricci iteration from several starts and compare the limits."""
    if not R < 1:
        raise ValueError("uniqueness regime requires R < 1")
    limits, iters = [], []
    for phi0 in starts:
        if phi0.grid.n != n or phi0.grid.R != R:
            raise ValueError("start lives on a different ball")
        phi, trace = ricci_iterate(phi0, 1.0, iter_tol, max_iter)
        limits.append(phi)
        iters.append(trace.iterations)
    dist = 0.0
    for i in range(len(limits)):
        for j in range(i + 1, len(limits)):
            dist = max(dist, limits[i].sup_distance(limits[j]))
    return UniquenessReport(dist, tol, dist <= tol, tuple(limits), tuple(iters))
