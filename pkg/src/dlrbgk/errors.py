"""Exception hierarchy shared by the solver modules and the CLI."""


class DLRError(Exception):
    """Base class for all package errors."""


class ConfigError(DLRError, ValueError):
    """Invalid grid, scenario or run configuration (CLI exit code 1)."""


class NumericalError(DLRError, ArithmeticError):
    """A numerical failure during time stepping (CLI exit code 2)."""


class GridMismatchError(ConfigError):
    """Two fields live on incompatible grids."""


class DensityPositivityError(NumericalError):
    """density positivity lost"""

    def __init__(self, min_rho):
        self.min_rho = float(min_rho)
        super().__init__(f"density positivity lost (min rho = {self.min_rho:.3e})")


class VelocityDomainOverflow(NumericalError):
    """Bulk velocity left the interior of the velocity grid."""

    def __init__(self, umin, umax, lo, hi):
        self.umin, self.umax, self.lo, self.hi = umin, umax, lo, hi
        super().__init__(
            f"velocity-domain overflow: u in [{umin:.4g}, {umax:.4g}] but the "
            f"spline-safe interior is [{lo:.4g}, {hi:.4g}]; enlarge the velocity grid"
        )


class SingularSStepError(NumericalError):
    def __init__(self, cond):
        self.cond = float(cond)
        super().__init__(f"S-step matrix singular (condition estimate {self.cond:.3e})")
