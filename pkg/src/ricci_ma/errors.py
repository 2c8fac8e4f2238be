"""Exception hierarchy shared by the solver modules and the CLI."""


class RicciMAError(Exception):
    """Base class for every error raised by ``ricci_ma``."""


class InvalidGrid(RicciMAError, ValueError):
    pass


class InvalidPotential(RicciMAError, ValueError):
    pass


class NonMonotoneMass(RicciMAError, ValueError):
    """Cumulative Monge-Ampere mass decreases: the candidate is not psh."""


class SingularMass(RicciMAError, ValueError):
    """Mass atom at the origin; the Dirichlet solution would be unbounded."""


class OverflowRisk(RicciMAError, FloatingPointError):
    pass


class GridMismatch(RicciMAError, ValueError):
    pass


class Diverged(RicciMAError, RuntimeError):
    """Fixed-point iteration ran away (t likely beyond the solvable range)."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class SolverStall(RicciMAError, RuntimeError):
    pass


class NonConvexProfile(RicciMAError, ValueError):
    pass


class NotPositiveMetric(RicciMAError, ValueError):
    pass


class InvalidConfig(RicciMAError, ValueError):
    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("invalid config: " + "; ".join(self.problems))


class IoFailure(RicciMAError, OSError):
    pass
