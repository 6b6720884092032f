"""Dynamical low-rank solver for the isothermal BGK equation in two space and two velocity dimensions.

The kinetic density is written ``f = M[rho, u] g`` with a local Maxwellian
``M`` and a rank-``r`` factorisation ``g = sum_ij X_i(x) S_ij V_j(v)``.
"""

from .config import ScenarioConfig, load, preset
from .errors import (
    ConfigError,
    DensityPositivityError,
    DLRError,
    GridMismatchError,
    NumericalError,
    SingularSStepError,
    VelocityDomainOverflow,
)
from .grids import SpatialGrid, VelocityGrid, make_grids
from .integrator import full_step
from .lowrank import LowRankState, deviation_from_equilibrium
from .maxwell import MomentState
from .runner import run

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DLRError", "DensityPositivityError", "GridMismatchError", "LowRankState", "MomentState",
    "NumericalError", "ScenarioConfig", "SingularSStepError", "SpatialGrid", "VelocityDomainOverflow",
    "VelocityGrid", "deviation_from_equilibrium", "full_step", "load", "make_grids", "preset", "run",
]
