"""Maxwellian-weighted velocity moments of the low-rank basis via FFT convolution.

For ``T = 1`` the moments ``<v V_j M>`` and ``<v (x) v V_j M>`` are
convolutions of ``v V_j`` and ``(v (x) v) V_j`` with ``exp(-|v|^2/2)``,
evaluated at ``u(x)``.  The convolutions are tabulated on the velocity grid
and interpolated with natural bicubic splines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spline
from .errors import DensityPositivityError, VelocityDomainOverflow
from .grids import SpatialGrid, VelocityGrid, convolve_gaussian, derivative
from .lowrank import LowRankState

TWO_PI = 2.0 * np.pi

# table channel layout
CH_0, CH_X, CH_Y, CH_XX, CH_XY, CH_YY = range(6)
FLUX_CHANNELS = (CH_X, CH_Y, CH_XX, CH_XY, CH_YY)


@dataclass(frozen=True)
class MomentState:
    """Density ``rho`` of shape ``(nx, ny)`` and bulk velocity ``u`` of shape ``(2, nx, ny)``."""

    rho: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        if self.u.shape != (2,) + self.rho.shape:
            raise ValueError(f"u has shape {self.u.shape}, expected {(2,) + self.rho.shape}")

    @property
    def momentum(self):
        return self.rho * self.u

    def conserved(self):
        return np.concatenate([self.rho[None], self.rho * self.u])

    @classmethod
    def from_conserved(cls, U):
        rho = U[0]
        if not np.all(rho > 0):
            raise DensityPositivityError(np.min(rho))
        return cls(rho.copy(), U[1:] / rho)


@dataclass(frozen=True)
class ConvTable:
    """Gaussian convolutions of the weighted basis functions.

    ``values[c, j]`` holds channel ``c`` of basis function ``j`` at the
    velocity nodes, channels ordered ``(1, v1, v2, v1 v1, v1 v2, v2 v2)``;
    ``coeffs`` are the padded spline coefficients with shape
    ``(nv+2, nv+2, r, 6)``.
    """

    values: np.ndarray
    coeffs: np.ndarray
    vgrid: VelocityGrid

    @property
    def rank(self):
        return self.values.shape[1]

    @property
    def g0(self):
        return self.values[CH_0]

    @property
    def g1(self):
        return self.values[CH_X : CH_Y + 1]

    @property
    def g2(self):
        return self.values[CH_XX:]

    def safe_bounds(self):
        g = self.vgrid
        return g.av + 2.0 * g.dv, g.bv - 2.0 * g.dv

    def evaluate(self, u, channels=None):
        """Raw table values at velocities ``u`` (shape ``(2, ...)``); returns ``(..., r, nc)``."""
        t1, t2 = self._node_coords(u)
        return spline.evaluate_2d(self._channel_coeffs(channels), t1, t2)

    def contract(self, K, u, channels):
        """``sum_j K_j(x) g^c_j(u(x))`` for each channel; returns ``(nc,) + K.shape[1:]``."""
        t1, t2 = self._node_coords(u)
        return spline.contract_2d(self._channel_coeffs(channels), t1, t2, K)

    def _node_coords(self, u):
        lo, hi = self.safe_bounds()
        umin, umax = float(np.min(u)), float(np.max(u))
        if umin < lo or umax > hi or not np.all(np.isfinite(u)):
            raise VelocityDomainOverflow(umin, umax, lo, hi)
        v0 = self.vgrid.v[0]
        dv = self.vgrid.dv
        return (u[0] - v0) / dv, (u[1] - v0) / dv

    def _channel_coeffs(self, channels):
        if channels is None:
            return self.coeffs
        channels = tuple(channels)
        if channels == tuple(range(self.coeffs.shape[-1])):
            return self.coeffs
        return np.ascontiguousarray(self.coeffs[..., list(channels)])


def _weights(vgrid: VelocityGrid):
    v1, v2 = vgrid.mesh()
    return np.stack([np.ones_like(v1), v1, v2, v1 * v1, v1 * v2, v2 * v2])


def build_conv_tables(V, vgrid: VelocityGrid) -> ConvTable:
    """Tabulate ``g^0_j, g^1_j, g^2_j`` for every basis function and fit splines."""
    V = np.asarray(V, dtype=float)
    src = _weights(vgrid)[:, None] * V[None]  # (6, r, nv, nv)
    values = convolve_gaussian(src, vgrid)
    C = spline.coefficients_2d(values)  # (6, r, nv+2, nv+2)
    coeffs = np.ascontiguousarray(np.moveaxis(C, (0, 1), (3, 2)))
    return ConvTable(values, coeffs, vgrid)


def flux_from_K(K, rho, u, table: ConvTable):
    """Fluxes ``(Phi1, Phi2)`` for given ``K_j(x) = sum_i X_i S_ij``, density and velocity."""
    vals = table.contract(K, u, FLUX_CHANNELS)
    pref = rho / TWO_PI
    Phi1 = vals[0:2] * pref
    Phi2 = vals[2:5] * pref
    return Phi1, Phi2


def maxwellian_flux_fields(state: LowRankState, mom: MomentState, table: ConvTable):
    """``Phi1 = <v M g>`` (shape ``(2, nx, ny)``) and ``Phi2 = <v (x) v M g>`` (``(3, nx, ny)``)."""
    return flux_from_K(state.K(), mom.rho, mom.u, table)


def density_from_g(state: LowRankState, mom: MomentState, table: ConvTable):
    """``<M g>_v``; equals ``rho`` when ``g`` is consistent with the moments."""
    return table.contract(state.K(), mom.u, (CH_0,))[0] * mom.rho / TWO_PI


def _centred_second_moment(vals, u):
    g0, g1x, g1y, g2xx, g2xy, g2yy = vals
    u1, u2 = u
    return np.stack(
        [
            g2xx - 2.0 * u1 * g1x + u1 * u1 * g0,
            g2xy - u1 * g1y - u2 * g1x + u1 * u2 * g0,
            g2yy - 2.0 * u2 * g1y + u2 * u2 * g0,
        ]
    )


def stress_tensor_P1(state: LowRankState, mom: MomentState, table: ConvTable, eps, equilibrium="grid"):
    """First-order stress ``-(1/eps) int (v-u)(x)(v-u) (f - M) dv`` as ``(xx, xy, yy)``.

    ``equilibrium="grid"`` integrates the Maxwellian term with the same
    velocity quadrature as ``f`` so the domain-truncation error cancels;
    ``"exact"`` uses the closed form ``rho * Id``.
    """
    pref = mom.rho / TWO_PI
    moment_f = pref * _centred_second_moment(table.contract(state.K(), mom.u, range(6)), mom.u)
    if equilibrium == "grid":
        unit = build_conv_tables(np.ones((1,) + table.vgrid.shape), table.vgrid)
        ones = np.ones((1,) + mom.rho.shape)
        moment_m = pref * _centred_second_moment(unit.contract(ones, mom.u, range(6)), mom.u)
    elif equilibrium == "exact":
        moment_m = np.stack([mom.rho, np.zeros_like(mom.rho), mom.rho])
    else:
        raise ValueError(f"unknown equilibrium treatment {equilibrium!r}")
    return (moment_m - moment_f) / eps


def velocity_gradient(u, grid: SpatialGrid, kind="spectral"):
    """``J[a, b] = d u_a / d x_b`` with shape ``(2, 2, nx, ny)``."""
    return np.stack(
        [np.stack([derivative(u[a], grid, 0, kind), derivative(u[a], grid, 1, kind)]) for a in range(2)]
    )


def sigma_u(u, grid: SpatialGrid, kind="spectral"):
    """``grad u + grad u^T - (div u) Id`` (two velocity dimensions) as ``(xx, xy, yy)``."""
    J = velocity_gradient(u, grid, kind)
    div = J[0, 0] + J[1, 1]
    return np.stack([2.0 * J[0, 0] - div, J[0, 1] + J[1, 0], 2.0 * J[1, 1] - div])
