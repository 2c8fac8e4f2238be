"""Energy, the F functional and the inequality checks built on them.

Everything here acts on radial potentials. ``energy`` is the Stieltjes
integral ``(1/(n+1)) int phi dM`` against the Monge-Ampere mass, and
``F = E + log int e^{-phi} dmu``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .radial import RadialPotential, check_same_grid, log_int_exp, ma_apply

SLACK_RTOL = 1e-9


@dataclass(frozen=True)
class FunctionalReport:
    E: float
    logIntExp: float
    F: float
    feasible: bool = True

    def to_json(self) -> dict:
        return {"E": self.E, "logIntExp": self.logIntExp, "F": self.F}


@dataclass(frozen=True)
class InequalityVerdict:
    """``lhs <= rhs`` up to the scale-aware slack tolerance."""

    lhs: float
    rhs: float
    slack: float
    holds: bool
    fittedConstant: Optional[float] = None

    @classmethod
    def compare(cls, lhs: float, rhs: float, fitted: Optional[float] = None, tol: Optional[float] = None):
        lhs, rhs = float(lhs), float(rhs)
        if tol is None:
            tol = SLACK_RTOL * (1.0 + abs(lhs) + abs(rhs))
        slack = rhs - lhs
        return cls(lhs, rhs, slack, bool(slack >= -tol), fitted)

    def to_json(self) -> dict:
        return asdict(self)


def energy(phi: RadialPotential) -> float:
    n = phi.grid.n
    M = ma_apply(phi).values
    v = phi.values
    return float(np.sum(0.5 * (v[1:] + v[:-1]) * np.diff(M)) / (n + 1))


def f_functional(phi: RadialPotential, exponent_cap: float = 700.0) -> FunctionalReport:
    E = energy(phi)
    L = log_int_exp(phi, 1.0, exponent_cap)
    return FunctionalReport(E, L, E + L, True)


def f_functional_t(phi: RadialPotential, t: float, exponent_cap: float = 700.0) -> float:
    """``E + (1/t) log int e^{-t phi} dmu``, the Lyapunov functional of the t-iteration.

    Equals ``F`` at ``t = 1``; the ``t -> 0`` limit is ``E - int phi dmu``.
    """
    E = energy(phi)
    if t == 0:
        return E - float(np.dot(phi.grid.weights, phi.values))
    return E + log_int_exp(phi, t, exponent_cap) / t


def relative_entropy(phi: RadialPotential, psi: RadialPotential) -> float:
    """Relative entropy of ``mu_phi`` with respect to ``mu_psi``.

    ``mu_phi = e^{-phi} mu / int e^{-phi} dmu``. Evaluated as the discrete
    Kullback-Leibler divergence of the nodal quadrature weights, so it is
    nonnegative by Gibbs' inequality and vanishes only for ``phi == psi``.
    """
    check_same_grid(phi, psi)
    w = phi.grid.weights
    a = -phi.values + np.min(phi.values)
    b = -psi.values + np.min(psi.values)
    p = w * np.exp(a)
    q = w * np.exp(b)
    p /= p.sum()
    q /= q.sum()
    mask = p > 0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def mt_check(phi: RadialPotential, beta: float, C: Optional[float] = None) -> InequalityVerdict:
    """Moser-Trudinger: ``log int e^{-phi} dmu <= beta |E(phi)| + log C``.

    Without ``C`` the verdict is in fitting mode: the constant making this
    member an equality is reported and used.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    lhs = log_int_exp(phi)
    bE = beta * abs(energy(phi))
    fitted = math.exp(lhs - bE)
    if C is None:
        return InequalityVerdict.compare(lhs, bE + (lhs - bE), fitted)
    return InequalityVerdict.compare(lhs, bE + math.log(C), fitted)


def mt_fit(family: Iterable[RadialPotential], beta: float) -> tuple[float, list[InequalityVerdict]]:
    """Fit the smallest admissible C over a family, then check every member with it."""
    family = list(family)
    fitted = max(mt_check(phi, beta).fittedConstant for phi in family)
    return fitted, [mt_check(phi, beta, fitted) for phi in family]


def default_beta(n: int) -> float:
    """``max(beta'_n(gamma=2n) + 0.05, 0.5)`` capped below one."""
    return min(max(beta_constants(n, 2.0 * n, 1.0) + 0.05, 0.5), 0.99)


def sublevel_radius(phi: RadialPotential, t: float) -> float:
    """``inf {r : phi(r) >= -t}`` by linear interpolation of the monotone samples."""
    v, r = phi.values, phi.grid.nodes
    if v[0] >= -t:
        return 0.0
    i = int(np.searchsorted(v, -t, side="left"))
    i = min(max(i, 1), v.size - 1)
    v0, v1 = v[i - 1], v[i]
    if v1 == v0:
        return float(r[i])
    return float(r[i - 1] + (r[i] - r[i - 1]) * (-t - v0) / (v1 - v0))


def capacity_sublevel_check(phi: RadialPotential, t: float) -> InequalityVerdict:
    """``Cap(phi < -t) <= (n+1)|E(phi)| / t^(n+1)`` with the radial capacity formula."""
    if not t > 0:
        raise ValueError("t must be positive")
    n, R = phi.grid.n, phi.grid.R
    rhs = (n + 1) * abs(energy(phi)) / t ** (n + 1)
    rho = sublevel_radius(phi, t)
    if rho <= 0.0:
        return InequalityVerdict.compare(0.0, rhs)
    return InequalityVerdict.compare(math.log(R / rho) ** (-n), rhs)


def volume_capacity_check(
    rho_inner: float | Sequence[float], gamma: float, n: int, R: float = 1.0, C: Optional[float] = None
) -> InequalityVerdict:
    """``mu(B_rho) <= C_gamma exp(-gamma / Cap(B_rho)^(1/n))`` on ``B_R``.

    A sequence of radii is treated as a sweep: the fitted constant is the
    smallest one valid for all of them and the verdict reports the tightest
    member.
    """
    rhos = np.atleast_1d(np.asarray(rho_inner, dtype=float))
    if np.any(rhos <= 0) or np.any(rhos >= R):
        raise ValueError("need 0 < rho < R")
    if gamma > 2 * n:
        raise ValueError("gamma above the optimal exponent 2n")
    lhs = (rhos / R) ** (2 * n)
    expo = np.exp(-gamma * np.log(R / rhos))
    fitted = float(np.max(lhs / expo))
    c = fitted if C is None else float(C)
    k = int(np.argmin(c * expo - lhs))
    return InequalityVerdict.compare(lhs[k], c * expo[k], fitted)


def beta_constants(n: int, gamma: float, A: float) -> float:
    """``A^(n+1) / (gamma^n (1 + 1/n)^n)``; ``A = 1`` gives the bare MT exponent."""
    if n < 1 or gamma <= 0 or A <= 0:
        raise ValueError("need n >= 1, gamma > 0, A > 0")
    return A ** (n + 1) / (gamma ** n * (1.0 + 1.0 / n) ** n)


def bishop_bound(n: int) -> float:
    """Upper bound on t from volume comparison: ``4(2n-1)[(n-1)! n!/(2n-1)!]^(1/n)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ratio = math.factorial(n - 1) * math.factorial(n) / math.factorial(2 * n - 1)
    return 4.0 * (2 * n - 1) * ratio ** (1.0 / n)


def mt_solvable_bound(n: int) -> float:
    """Range of t controlled by Moser-Trudinger: ``(2n)^(1+1/n) (1+1/n)^(1+1/n)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    e = 1.0 + 1.0 / n
    return (2.0 * n) ** e * e ** e
