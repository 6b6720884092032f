"""MacCormack solver for the isothermal compressible Navier--Stokes equations.

    d_t rho + div(rho u) = 0
    d_t (rho u) + div(rho u (x) u + rho Id) = eps div sigma(u)

In two dimensions ``div sigma(u) = Laplace(u)``, so the viscous term is a
five-point Laplacian of the velocity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DensityPositivityError
from .grids import SpatialGrid, derivative


@dataclass(frozen=True)
class FluidState:
    """Conserved variables ``U = (rho, rho u1, rho u2)`` of shape ``(3, nx, ny)``."""

    U: np.ndarray

    def __post_init__(self):
        if self.U.ndim != 3 or self.U.shape[0] != 3:
            raise ConfigError(f"U must have shape (3, nx, ny), got {self.U.shape}")

    @property
    def rho(self):
        return self.U[0]

    @property
    def u(self):
        return self.U[1:] / self.U[0]

    @classmethod
    def from_primitive(cls, rho, u):
        return cls(np.concatenate([rho[None], rho * u]))


def euler_fluxes(U):
    rho, m1, m2 = U
    F = np.stack([m1, m1 * m1 / rho + rho, m1 * m2 / rho])
    G = np.stack([m2, m1 * m2 / rho, m2 * m2 / rho + rho])
    return F, G


def _laplacian(q, grid: SpatialGrid):
    ax, ay = q.ndim - 2, q.ndim - 1
    lx = (np.roll(q, -1, ax) - 2.0 * q + np.roll(q, 1, ax)) / grid.dx**2
    ly = (np.roll(q, -1, ay) - 2.0 * q + np.roll(q, 1, ay)) / grid.dy**2
    return lx + ly


def _diff(q, h, axis, forward):
    if forward:
        return (np.roll(q, -1, axis) - q) / h
    return (q - np.roll(q, 1, axis)) / h


def _rhs(U, eps, grid, fwd_x, fwd_y):
    F, G = euler_fluxes(U)
    out = -_diff(F, grid.dx, -2, fwd_x) - _diff(G, grid.dy, -1, fwd_y)
    if eps:
        out[1:] += eps * _laplacian(U[1:] / U[0], grid)
    return out


def maccormack_step(state: FluidState, eps, dt, grid: SpatialGrid, step_index=0) -> FluidState:
    """One predictor-corrector step.

    The predictor uses forward and the corrector backward differences; on odd
    ``step_index`` the roles are swapped to remove the directional bias.
    """
    fwd = step_index % 2 == 0
    U = state.U
    Up = U + dt * _rhs(U, eps, grid, fwd, fwd)
    if not np.all(Up[0] > 0):
        raise DensityPositivityError(np.min(Up[0]))
    Un = 0.5 * (U + Up + dt * _rhs(Up, eps, grid, not fwd, not fwd))
    if not np.all(Un[0] > 0):
        raise DensityPositivityError(np.min(Un[0]))
    return FluidState(Un)


def cfl_number(state: FluidState, dt, grid: SpatialGrid):
    """Advisory ``max(|u| + 1) dt / h`` (isothermal sound speed 1)."""
    speed = np.max(np.sqrt(np.sum(state.u**2, axis=0))) + 1.0
    return float(speed * dt / min(grid.dx, grid.dy))


def vorticity(u, grid: SpatialGrid, kind="spectral"):
    """``d u2 / dx - d u1 / dy``."""
    return derivative(u[1], grid, 0, kind) - derivative(u[0], grid, 1, kind)
