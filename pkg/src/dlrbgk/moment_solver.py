"""Time stepping of the density and momentum equations.

Conserved variables are stored as one array ``U`` of shape ``(3, nx, ny)``
holding ``(rho, rho u1, rho u2)``.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, DensityPositivityError
from .grids import SpatialGrid, divergence, divergence_sym
from .lowrank import LowRankState
from .maxwell import ConvTable, MomentState, flux_from_K


def moment_rhs(state: LowRankState, mom: MomentState, table: ConvTable, kind="spectral"):
    """``I1 = -div Phi1`` and ``I2 = -div Phi2`` at the current state."""
    Phi1, Phi2 = flux_from_K(state.K(), mom.rho, mom.u, table)
    grid = state.xgrid
    return -divergence(Phi1, grid, kind), -divergence_sym(Phi2, grid, kind)


def euler_moment_step(mom: MomentState, I1, I2, dt, conservative=True) -> MomentState:
    """Forward Euler update of ``rho`` and ``u``.

    The default updates ``rho u`` and divides, i.e.
    ``u+ = u + dt (I2 - I1 u) / rho+``, which keeps total momentum exact.
    ``conservative=False`` uses ``rho^n`` in the denominator instead.
    """
    if dt <= 0:
        raise ConfigError(f"dt must be positive, got {dt}")
    rho = mom.rho + dt * I1
    if not np.all(rho > 0):
        raise DensityPositivityError(np.min(rho))
    if conservative:
        u = (mom.rho * mom.u + dt * I2) / rho
    else:
        u = mom.u + (dt / mom.rho) * (I2 - I1 * mom.u)
    return MomentState(rho, u)


def minmod(a, b):
    """0 if the signs differ, otherwise the argument of smaller magnitude."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.where(a * b > 0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)
    return out if out.ndim else float(out)


def _limited_slope(q, ax):
    fwd = np.roll(q, -1, axis=ax) - q
    bwd = q - np.roll(q, 1, axis=ax)
    return minmod(fwd, bwd)


def _sh(q, di, dj):
    """``q[i+di, j+dj]`` on the periodic grid."""
    return np.roll(q, (-di, -dj), axis=(-2, -1))


def nt2d_half_step(U, flux, dt, grid: SpatialGrid):
    """One staggered Nessyahu--Tadmor step of size ``dt``.

    ``flux(U)`` returns the x- and y-fluxes ``(F, G)`` with the shape of
    ``U``.  Output index ``[i, j]`` lives at ``(i + 1/2, j + 1/2)`` relative to
    the input nodes.
    """
    lx = dt / grid.dx
    ly = dt / grid.dy
    F, G = flux(U)
    Ux = _limited_slope(U, -2)
    Uy = _limited_slope(U, -1)
    Fx = _limited_slope(F, -2)
    Gy = _limited_slope(G, -1)
    Us = U - 0.5 * lx * Fx - 0.5 * ly * Gy
    _check_rho(Us[0])
    Fs, Gs = flux(Us)
    avg = 0.25 * (U + _sh(U, 1, 0) + _sh(U, 0, 1) + _sh(U, 1, 1))
    slopes = (Ux - _sh(Ux, 1, 0) + _sh(Ux, 0, 1) - _sh(Ux, 1, 1)) / 16.0
    slopes += (Uy - _sh(Uy, 0, 1) + _sh(Uy, 1, 0) - _sh(Uy, 1, 1)) / 16.0
    dF = 0.5 * (_sh(Fs, 1, 0) - Fs + _sh(Fs, 1, 1) - _sh(Fs, 0, 1))
    dG = 0.5 * (_sh(Gs, 0, 1) - Gs + _sh(Gs, 1, 1) - _sh(Gs, 1, 0))
    out = avg + slopes - lx * dF - ly * dG
    _check_rho(out[0])
    return out


def _check_rho(rho):
    if not np.all(rho > 0):
        raise DensityPositivityError(np.min(rho))


def kinetic_flux(K, table: ConvTable):
    """Flux evaluator for the moment system with the low-rank factors frozen."""

    def flux(U):
        rho = U[0]
        _check_rho(rho)
        Phi1, Phi2 = flux_from_K(K, rho, U[1:] / rho, table)
        F = np.stack([Phi1[0], Phi2[0], Phi2[1]])
        G = np.stack([Phi1[1], Phi2[1], Phi2[2]])
        return F, G

    return flux


def stagger(q):
    """Average node values onto the cell corners ``(i + 1/2, j + 1/2)``."""
    return 0.25 * (q + _sh(q, 1, 0) + _sh(q, 0, 1) + _sh(q, 1, 1))


def nt_staggered_full_step(U, state: LowRankState, table: ConvTable, dt):
    """Two staggered half steps of size ``dt/2``; the result is back on the original nodes."""
    K = state.K()
    half = nt2d_half_step(U, kinetic_flux(K, table), 0.5 * dt, state.xgrid)
    out = nt2d_half_step(half, kinetic_flux(stagger(K), table), 0.5 * dt, state.xgrid)
    return np.roll(out, (1, 1), axis=(-2, -1))
