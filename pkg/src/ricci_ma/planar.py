"""Planar (n = 1) backend on general domains.

For n = 1, ``dd^c phi = (Delta phi / 2 pi) dA``, so the Monge-Ampere problem
becomes the Liouville-type equation

    Delta phi = 2 pi e^{-t phi} / int_Omega e^{-t phi} dA,   phi = 0 on the boundary,

solved by Picard iteration with one linear Dirichlet solve per step. The
Laplacian uses Shortley-Weller stencils (shortened arms at the curved
boundary) so the scheme stays second order.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy import ndimage
from scipy.optimize import brentq

from .errors import Diverged, InvalidConfig, NotPositiveMetric, SolverStall
from .iteration import DIVERGE_STREAK, ENERGY_CAP, IterationTrace, StepRecord

LINEAR_RTOL = 1e-10


def polynomial(coeffs) -> Callable:
    """``rho(x, y) = sum c x^i y^j`` from ``[[i, j, c], ...]``."""
    terms = [(int(i), int(j), float(c)) for i, j, c in coeffs]

    def rho(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape)
        for i, j, c in terms:
            out = out + c * x ** i * y ** j
        return out

    return rho


@dataclass(eq=False)
class PlanarDomain:
    """Masked uniform grid over ``Omega = {rho < 0}``."""

    rho: Callable
    bbox: tuple
    h: float
    exact_area: Optional[float] = None
    description: dict = field(default_factory=dict)

    def __post_init__(self):
        x0, x1, y0, y1 = map(float, self.bbox)
        nx = int(round((x1 - x0) / self.h)) + 1
        ny = int(round((y1 - y0) / self.h)) + 1
        self.x = x0 + self.h * np.arange(nx)
        self.y = y0 + self.h * np.arange(ny)
        X, Y = np.meshgrid(self.x, self.y, indexing="ij")
        self.rho_values = self.rho(X, Y)
        # nodes sitting on the boundary up to round-off count as exterior
        self.mask = self.rho_values < -1e-12 * max(1.0, float(np.max(np.abs(self.rho_values))))
        # grid nodes outside the box are treated as exterior
        self.mask[0, :] = self.mask[-1, :] = self.mask[:, 0] = self.mask[:, -1] = False
        if not self.mask.any():
            raise InvalidConfig("domain mask is empty at this resolution")
        _, ncomp = ndimage.label(self.mask)
        if ncomp != 1:
            raise InvalidConfig(f"domain mask must be 4-connected, found {ncomp} components")
        self.index = -np.ones(self.mask.shape, dtype=int)
        self.ij = np.argwhere(self.mask)
        self.index[self.mask] = np.arange(len(self.ij))
        self.fractions = self._edge_fractions()

    @classmethod
    def from_json(cls, desc: dict) -> "PlanarDomain":
        shape = desc.get("shape")
        res = int(desc.get("resolution", 64))
        if shape == "disc":
            R = float(desc["R"])
            h = float(desc.get("h", R / res))
            return cls(lambda x, y: x * x + y * y - R * R, _padded((-R, R, -R, R), h), h, math.pi * R * R, dict(desc))
        if shape == "ellipse":
            a, b = float(desc["a"]), float(desc["b"])
            h = float(desc.get("h", min(a, b) / res))
            box = (-a, a, -b, b)
            return cls(lambda x, y: (x / a) ** 2 + (y / b) ** 2 - 1.0, _padded(box, h), h, math.pi * a * b, dict(desc))
        if shape == "square":
            L = float(desc.get("side", 1.0))
            h = float(desc.get("h", L / (2 * res)))
            c = L / 2
            return cls(lambda x, y: np.maximum(np.abs(x), np.abs(y)) - c, _padded((-c, c, -c, c), h), h, L * L, dict(desc))
        if shape == "implicit":
            rho = polynomial(desc["expr"])
            box = tuple(float(v) for v in desc["bbox"])
            h = float(desc.get("h", min(box[1] - box[0], box[3] - box[2]) / (2 * res)))
            return cls(rho, _padded(box, h), h, None, dict(desc))
        raise InvalidConfig(f"unknown domain shape {shape!r}")

    def to_json(self) -> dict:
        d = dict(self.description)
        d["h"] = self.h
        return d

    @property
    def size(self) -> int:
        return len(self.ij)

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        return self.x[self.ij[:, 0]], self.y[self.ij[:, 1]]

    def _edge_fractions(self) -> np.ndarray:
        """Fraction ``theta in (0, 1]`` of each arm (E, W, N, S) that lies inside."""
        out = np.ones((self.size, 4))
        for k, (i, j) in enumerate(self.ij):
            p = (self.x[i], self.y[j])
            for d, (di, dj) in enumerate(((1, 0), (-1, 0), (0, 1), (0, -1))):
                if self.mask[i + di, j + dj]:
                    continue
                q = (self.x[i + di], self.y[j + dj])
                g = lambda s: float(self.rho(p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])))
                if g(1.0) <= 0.0:
                    out[k, d] = 1.0
                else:
                    out[k, d] = brentq(g, 0.0, 1.0, xtol=1e-15)
        return out

    @cached_property
    def laplacian(self) -> sp.csc_matrix:
        """Shortley-Weller Laplacian on interior nodes, zero Dirichlet data."""
        h = self.h
        rows, cols, vals = [], [], []
        th = self.fractions
        nbr = ((1, 0), (-1, 0), (0, 1), (0, -1))
        for k, (i, j) in enumerate(self.ij):
            diag = 0.0
            for axis in (0, 1):
                a, b = 2 * axis, 2 * axis + 1  # plus arm, minus arm
                hp, hm = th[k, a] * h, th[k, b] * h
                diag -= 2.0 / (hp * hm)
                for arm, length, other in ((a, hp, hm), (b, hm, hp)):
                    di, dj = nbr[arm]
                    if self.mask[i + di, j + dj]:
                        rows.append(k)
                        cols.append(self.index[i + di, j + dj])
                        vals.append(2.0 / (length * (length + other)))
            rows.append(k)
            cols.append(k)
            vals.append(diag)
        return sp.csc_matrix((vals, (rows, cols)), shape=(self.size, self.size))

    @cached_property
    def _lu(self):
        return spla.splu(self.laplacian)

    @cached_property
    def area(self) -> float:
        if self.exact_area is not None:
            return float(self.exact_area)
        from skimage import measure

        # polygonal boundary from a 4x refined sampling; second-order area
        xs = np.linspace(self.x[0], self.x[-1], 4 * (self.x.size - 1) + 1)
        ys = np.linspace(self.y[0], self.y[-1], 4 * (self.y.size - 1) + 1)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        area = 0.0
        dx, dy = xs[1] - xs[0], ys[1] - ys[0]
        for c in measure.find_contours(self.rho(X, Y), 0.0):
            px, py = xs[0] + c[:, 0] * dx, ys[0] + c[:, 1] * dy
            area += 0.5 * abs(np.dot(px, np.roll(py, -1)) - np.dot(py, np.roll(px, -1)))
        return float(area)

    def integrate(self, g: np.ndarray, boundary_value: float = 0.0) -> float:
        """``int_Omega g dA`` for nodal samples of a smooth g with constant boundary trace."""
        return float(boundary_value * self.area + self.h ** 2 * np.sum(g - boundary_value))


def _padded(box, h):
    x0, x1, y0, y1 = box
    nx = math.ceil((x1 - x0) / h)
    ny = math.ceil((y1 - y0) / h)
    cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
    return (cx - 0.5 * nx * h - h, cx + 0.5 * nx * h + h, cy - 0.5 * ny * h - h, cy + 0.5 * ny * h + h)


@dataclass(eq=False)
class GridPotential2D:
    """Values at interior nodes; zero on the boundary."""

    domain: PlanarDomain
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.domain.size,):
            raise ValueError("values must match the interior nodes of the domain")

    def laplacian(self) -> np.ndarray:
        return self.domain.laplacian @ self.values

    def check_invariants(self, tol: float = 1e-9) -> None:
        scale = 1.0 + np.max(np.abs(self.values))
        if np.max(self.values) > tol * scale:
            raise ValueError("maximum principle violated: phi > 0 inside")
        lap = self.laplacian()
        if np.min(lap) < -tol * (1.0 + np.max(np.abs(lap))):
            raise ValueError("discrete Laplacian negative: candidate is not subharmonic")

    def sup_distance(self, other: "GridPotential2D") -> float:
        return float(np.max(np.abs(self.values - other.values)))

    def write_csv(self, path) -> None:
        x, y = self.domain.coords()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "value"])
            for row in zip(x, y, self.values):
                w.writerow([f"{v:.17g}" for v in row])

    @classmethod
    def read_csv(cls, path, domain: PlanarDomain) -> "GridPotential2D":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        values = np.zeros(domain.size)
        seen = np.zeros(domain.size, dtype=bool)
        for r in rows:
            i = int(round((float(r["x"]) - domain.x[0]) / domain.h))
            j = int(round((float(r["y"]) - domain.y[0]) / domain.h))
            k = domain.index[i, j]
            if k < 0:
                raise ValueError(f"node ({r['x']}, {r['y']}) lies outside the domain")
            values[k] = float(r["value"])
            seen[k] = True
        if not seen.all():
            raise ValueError("field file does not cover every interior node")
        return cls(domain, values)


def poisson_solve(f: np.ndarray, domain: PlanarDomain) -> GridPotential2D:
    """Discrete ``Delta phi = f`` inside, ``phi = 0`` on the boundary.

    The sparse LU factorization is computed once per domain and reused.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (domain.size,) or not np.all(np.isfinite(f)):
        raise ValueError("right-hand side must be finite on the interior nodes")
    phi = domain._lu.solve(f)
    res = np.linalg.norm(domain.laplacian @ phi - f)
    if res > LINEAR_RTOL * max(np.linalg.norm(f), 1e-300):
        raise SolverStall(f"linear residual {res:.3g} above tolerance")
    return GridPotential2D(domain, phi)


def _log_int_exp(domain: PlanarDomain, phi: np.ndarray, t: float) -> float:
    """``log int_Omega e^{-t phi} dA`` with the exponent shifted by ``min phi``."""
    lo = min(float(np.min(phi)), 0.0)
    g = np.exp(-t * (phi - lo))
    return math.log(domain.integrate(g, math.exp(t * lo))) - t * lo


def planar_functionals(u: GridPotential2D, t: float = 1.0) -> tuple[float, float]:
    """``(E, F_t)`` with ``E = (1/2) int phi Delta phi / 2pi dA`` and ``mu = dA / area``.

    ``F_t = E + (1/t) log int e^{-t phi} dmu`` (plain ``F`` at ``t = 1``).
    """
    d = u.domain
    E = 0.5 * d.integrate(u.values * u.laplacian()) / (2 * math.pi)
    if t == 0:
        return E, E - d.integrate(u.values) / d.area
    return E, E + (_log_int_exp(d, u.values, t) - math.log(d.area)) / t


def liouville_rhs(u: GridPotential2D, t: float) -> np.ndarray:
    d = u.domain
    lo = min(float(np.min(u.values)), 0.0)
    g = np.exp(-t * (u.values - lo))
    return 2 * math.pi * g / d.integrate(g, math.exp(t * lo))


def liouville_iterate(
    domain: PlanarDomain,
    t: float = 1.0,
    tol: float = 1e-10,
    max_iter: int = 500,
    phi0: Optional[GridPotential2D] = None,
) -> tuple[GridPotential2D, IterationTrace]:
    """Picard iteration ``Delta phi_{j+1} = 2 pi e^{-t phi_j} / int e^{-t phi_j} dA``."""
    u = phi0 if phi0 is not None else GridPotential2D(domain, np.zeros(domain.size))
    E, F = planar_functionals(u, t)
    trace = IterationTrace(t, tol, E, F)
    trace.C0 = float(np.max(-u.values, initial=0.0))
    streak, prev = 0, np.inf
    for j in range(max_iter):
        f = liouville_rhs(u, t)
        new = poisson_solve(f, domain)
        residual = float(np.max(np.abs(new.laplacian() - f)))
        E, F = planar_functionals(new, t)
        diff = new.sup_distance(u)
        trace.steps.append(StepRecord(j, E, F, diff, residual))
        trace.C0 = max(trace.C0, float(np.max(-new.values)))
        u = new
        if diff <= tol:
            trace.converged = True
            break
        streak = streak + 1 if diff > prev else 0
        prev = diff
        if streak >= DIVERGE_STREAK or abs(E) > ENERGY_CAP or not np.isfinite(diff):
            trace.reason = f"diverged at step {j}: supDiff={diff:.3g}, E={E:.3g}"
            raise Diverged(trace.reason, trace)
    if trace.converged:
        trace.fixed_point_residual = poisson_solve(liouville_rhs(u, t), domain).sup_distance(u)
    else:
        trace.reason = f"no convergence within {max_iter} iterations"
    return u, trace


def lambda1(
    phi: GridPotential2D, rtol: float = 1e-8, max_iter: int = 1000, weight: Optional[np.ndarray] = None
) -> float:
    """Smallest ``lambda`` with ``-Delta psi = lambda (Delta phi) psi``, ``psi = 0`` on the boundary.

    This is the first Dirichlet eigenvalue of the Laplacian of the metric
    ``dd^c phi`` (in n = 1 the metric Laplacian is ``Delta / Delta phi``).
    Inverse power iteration with shift 0, reusing the Poisson factorization.
    """
    d = phi.domain
    w = phi.laplacian() if weight is None else np.asarray(weight, dtype=float)
    if np.min(w) <= 1e-12 * np.max(np.abs(w)):
        raise NotPositiveMetric("Delta phi must be positive at every interior node")
    psi = np.ones(d.size)
    lam = np.inf
    for _ in range(max_iter):
        y = -d._lu.solve(w * psi)
        new = float(np.dot(psi, w * psi) / np.dot(psi, w * y))
        psi = y / np.sqrt(np.dot(y, w * y))
        if abs(new - lam) <= rtol * abs(new):
            return new
        lam = new
    raise SolverStall("inverse power iteration did not reach tolerance")


def load_domain(path) -> PlanarDomain:
    with open(path) as fh:
        return PlanarDomain.from_json(json.load(fh))
