"""Initial data and Knudsen-number fields for the bundled test problems."""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .fluid import FluidState
from .grids import SpatialGrid, VelocityGrid
from .integrator import KnudsenField
from .lowrank import LowRankState, SeparableTerm, constant_state, init_from_separable
from .maxwell import MomentState


def shear_flow_velocity(grid: SpatialGrid, v0=0.1, Delta=1.0 / 30.0, delta=5e-3):
    X, Y = grid.mesh()
    u1 = np.where(Y <= 0.5, v0 * np.tanh((Y - 0.25) / Delta), v0 * np.tanh((0.75 - Y) / Delta))
    u2 = delta * np.sin(2.0 * np.pi * X)
    return np.stack([u1, u2])


def shear_flow_init(xgrid: SpatialGrid, vgrid: VelocityGrid, r, v0=0.1, Delta=1.0 / 30.0, delta=5e-3):
    """Double shear layer with ``rho = 1`` and ``g = 1``."""
    mom = MomentState(np.ones(xgrid.shape), shear_flow_velocity(xgrid, v0, Delta, delta))
    return mom, constant_state(r, xgrid, vgrid)


def reynolds_to_eps(Re, v0=0.1):
    if Re <= 0:
        raise ConfigError(f"Reynolds number must be positive, got {Re}")
    return v0 / Re


def explosion_density(grid: SpatialGrid, R=1e-2, inside=1.0, outside=0.1):
    X, Y = grid.mesh()
    return np.where(X**2 + Y**2 <= R**2, inside, outside)


def explosion_init(xgrid: SpatialGrid, vgrid: VelocityGrid, r, R=1e-2):
    """Overpressure disc of radius ``R`` at the origin; ``u = 0``, ``g = 1``."""
    rho = explosion_density(xgrid, R)
    mom = MomentState(rho, np.zeros((2,) + xgrid.shape))
    return mom, constant_state(r, xgrid, vgrid)


def beam_profile(vgrid: VelocityGrid, n_b=1e-3, v_b=4.0, w_b=2.0, T_b=0.1):
    """``g - 1`` of the beam as a function of velocity."""
    v1, v2 = vgrid.mesh()
    return n_b * np.exp(-((v1 - v_b) ** 2 + (v2 - w_b) ** 2) / (2.0 * T_b) + 0.5 * (v1**2 + v2**2))


def beam_init(xgrid: SpatialGrid, vgrid: VelocityGrid, r, n_b=1e-3, v_b=4.0, w_b=2.0, T_b=0.1):
    """Spatially uniform equilibrium plus a narrow beam in velocity; exact at ``r >= 2``."""
    ones = np.ones(xgrid.shape)
    terms = [SeparableTerm(ones, np.ones(vgrid.shape)), SeparableTerm(ones, beam_profile(vgrid, n_b, v_b, w_b, T_b))]
    mom = MomentState(ones.copy(), np.zeros((2,) + xgrid.shape))
    return mom, init_from_separable(terms, r, xgrid, vgrid)


def epsilon_field(xgrid: SpatialGrid, eps0=1e-4) -> KnudsenField:
    """``eps0 + tanh(1 - 11 x) + tanh(1 + 11 x)``, independent of y."""
    X, _ = xgrid.mesh()
    return KnudsenField(eps0 + np.tanh(1.0 - 11.0 * X) + np.tanh(1.0 + 11.0 * X))


def fluid_from_moments(mom: MomentState) -> FluidState:
    return FluidState.from_primitive(mom.rho, mom.u)


def deviation_is_representable(state: LowRankState):
    """True if ``S`` has no NaN or Inf entries (cheap guard used by the runner)."""
    return bool(np.all(np.isfinite(state.S)))
