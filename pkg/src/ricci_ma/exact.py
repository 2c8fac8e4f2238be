"""Closed-form radial potentials used as oracles and as default test families.

Matching the exponent of ``e^{-phi}`` against ``(r phi')^n`` forces the
Fubini-Study-type candidate ``(n+1) log((1+r^2)/(1+R^2))``; the unit total
mass then pins the radius to ``R^2 = 1/(2n+1)``. Because the problem is
invariant under dilations, the solution on any other ball is the rescaling
``phi_star(r * R_star / R)``.
"""
from __future__ import annotations

import math

import numpy as np


def star_radius(n: int) -> float:
    return 1.0 / math.sqrt(2 * n + 1)


def phi_unif(n: int, R: float):
    """Potential with uniform Monge-Ampere measure: ``(r^2 - R^2)/(2 R^2)``."""

    def f(r):
        r = np.asarray(r, dtype=float)
        return (r * r - R * R) / (2.0 * R * R)

    return f


def mass_unif(n: int, R: float):
    return lambda r: (np.asarray(r, dtype=float) / R) ** (2 * n)


def phi_star(n: int, R: float | None = None):
    """Exact solution on ``B_R`` (rescaled from the Fubini-Study ball ``R_star``)."""
    Rs = star_radius(n)
    scale = 1.0 if R is None else Rs / R

    def f(r):
        rho2 = (np.asarray(r, dtype=float) * scale) ** 2
        return (n + 1) * np.log((1.0 + rho2) / (1.0 + Rs * Rs))

    return f


def mass_star(n: int, R: float | None = None):
    Rs = star_radius(n)
    scale = 1.0 if R is None else Rs / R

    def f(r):
        rho2 = (np.asarray(r, dtype=float) * scale) ** 2
        return (2 * (n + 1) * rho2 / (1.0 + rho2)) ** n

    return f


def energy_unif(n: int) -> float:
    return -1.0 / (2.0 * (n + 1) ** 2)


def log_int_exp_unif(n: int) -> float:
    """``log int e^{-phi_unif} dmu``; only n = 1 has the elementary form below."""
    if n != 1:
        raise NotImplementedError("closed form given for n = 1 only")
    return math.log(2.0 * (math.sqrt(math.e) - 1.0))


# n = 1 values on B_{R_star}; the energy is 4 int_1^{4/3} log(3v/4) v^-2 dv
ENERGY_STAR_1 = 1.0 - 4.0 * math.log(4.0 / 3.0)
LOG_INT_EXP_STAR_1 = math.log(4.0 / 3.0)
