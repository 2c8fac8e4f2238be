"""Ricci inverse iteration for complex Monge-Ampere equations on balls, with
a planar Liouville backend, Legendre-transform geodesics and the
Moser-Trudinger / capacity checks built on the energy functional."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .radial import (  # noqa: F401
    CumulativeMass,
    RadialGrid,
    RadialPotential,
    density_to_mass,
    log_int_exp,
    ma_apply,
    ma_solve_dirichlet,
)
from .functionals import (  # noqa: F401
    FunctionalReport,
    InequalityVerdict,
    energy,
    f_functional,
    mt_check,
    relative_entropy,
)
from .iteration import IterationTrace, ricci_iterate, ricci_step, t_sweep  # noqa: F401
