"""Periodic phase-space grids, quadrature and FFT helpers.

Spatial fields are arrays whose last two axes are ``(nx, ny)``; axis ``-2`` is
x and axis ``-1`` is y.  Velocity fields likewise end in ``(nv, nv)`` with
axes ``(v1, v2)``.  Vector fields carry a leading component axis of length 2
and symmetric tensors a leading axis of length 3 ordered ``(xx, xy, yy)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np
import scipy.fft as sfft

from .errors import ConfigError, GridMismatchError

DerivKind = Literal["spectral", "central", "forward", "backward"]


@dataclass(frozen=True)
class SpatialGrid:
    """Periodic 2D grid with nodes ``a + k*d``, ``k = 0..n-1``."""

    nx: int
    ny: int
    ax: float = 0.0
    bx: float = 1.0
    ay: float = 0.0
    by: float = 1.0

    def __post_init__(self):
        for name in ("nx", "ny"):
            n = getattr(self, name)
            if int(n) != n or n < 4 or n % 2:
                raise ConfigError(f"{name} must be an even integer >= 4, got {n!r}")
        if not (self.ax < self.bx and self.ay < self.by):
            raise ConfigError("spatial bounds must satisfy ax < bx and ay < by")

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def dx(self):
        return (self.bx - self.ax) / self.nx

    @property
    def dy(self):
        return (self.by - self.ay) / self.ny

    @property
    def weight(self):
        """Quadrature weight of one node (cell area)."""
        return self.dx * self.dy

    @property
    def area(self):
        return (self.bx - self.ax) * (self.by - self.ay)

    @property
    def x(self):
        return self.ax + self.dx * np.arange(self.nx)

    @property
    def y(self):
        return self.ay + self.dy * np.arange(self.ny)

    def mesh(self):
        return np.meshgrid(self.x, self.y, indexing="ij")

    def lengths(self):
        return (self.bx - self.ax, self.by - self.ay)

    def spacing(self, axis):
        return (self.dx, self.dy)[axis]


@dataclass(frozen=True)
class VelocityGrid:
    """Periodic square velocity grid on ``[av, bv]^2``.

    With ``centered=True`` (default) the nodes are cell centres
    ``av + (k + 1/2) dv`` so the node set is symmetric about the origin when
    ``av = -bv``; ``centered=False`` gives left-closed nodes ``av + k dv``.
    """

    nv: int
    av: float = -6.0
    bv: float = 6.0
    centered: bool = True

    def __post_init__(self):
        if int(self.nv) != self.nv or self.nv < 4:
            raise ConfigError(f"nv must be an integer >= 4, got {self.nv!r}")
        if not self.av < self.bv:
            raise ConfigError("velocity bounds must satisfy av < bv")

    @property
    def shape(self):
        return (self.nv, self.nv)

    @property
    def dv(self):
        return (self.bv - self.av) / self.nv

    @property
    def weight(self):
        return self.dv**2

    @property
    def area(self):
        return (self.bv - self.av) ** 2

    @property
    def v(self):
        shift = 0.5 if self.centered else 0.0
        return self.av + self.dv * (np.arange(self.nv) + shift)

    def mesh(self):
        return np.meshgrid(self.v, self.v, indexing="ij")


def make_grids(nx, ny, nv, ax=0.0, bx=1.0, ay=0.0, by=1.0, av=-6.0, bv=6.0, centered_v=True):
    if min(nx, ny, nv) <= 0:
        raise ConfigError("grid point counts must be positive")
    return SpatialGrid(nx, ny, ax, bx, ay, by), VelocityGrid(nv, av, bv, centered_v)


def _check_shape(a, b, grid):
    if a.shape[-2:] != grid.shape or b.shape[-2:] != grid.shape:
        raise GridMismatchError(
            f"field shapes {a.shape[-2:]} / {b.shape[-2:]} do not match grid {grid.shape}"
        )


def inner_x(a, b, grid: SpatialGrid):
    """Rectangle-rule approximation of the integral of ``a*b`` over the spatial domain."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    _check_shape(a, b, grid)
    return float(np.sum(a * b) * grid.weight)


def inner_v(a, b, grid: VelocityGrid):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    _check_shape(a, b, grid)
    return float(np.sum(a * b) * grid.weight)


def gram(A, B, weight):
    """Matrix of weighted inner products ``<A_i, B_k>`` for stacks of fields."""
    A2 = A.reshape(A.shape[0], -1)
    B2 = B.reshape(B.shape[0], -1)
    return (A2 @ B2.T) * weight


@lru_cache(maxsize=32)
def _wavenumbers(n, length):
    k = 2.0 * np.pi * sfft.rfftfreq(n, d=length / n)
    if n % 2 == 0:
        k[-1] = 0.0  # Nyquist mode has no real derivative
    return k


def spectral_dx(f, grid: SpatialGrid, axis: int):
    """Fourier spectral derivative of a periodic field along x (0) or y (1)."""
    f = np.asarray(f, dtype=float)
    if f.shape[-2:] != grid.shape:
        raise GridMismatchError(f"field shape {f.shape[-2:]} does not match grid {grid.shape}")
    ax = -2 if axis == 0 else -1
    n = grid.shape[axis]
    k = _wavenumbers(n, grid.lengths()[axis])
    fh = sfft.rfft(f, axis=ax)
    shape = [1] * f.ndim
    shape[ax] = k.size
    fh *= 1j * k.reshape(shape)
    return sfft.irfft(fh, n=n, axis=ax)


def derivative(f, grid: SpatialGrid, axis: int, kind: DerivKind = "spectral"):
    """First derivative of a periodic field with the requested stencil."""
    if kind == "spectral":
        return spectral_dx(f, grid, axis)
    ax = -2 if axis == 0 else -1
    h = grid.spacing(axis)
    if kind == "central":
        return (np.roll(f, -1, axis=ax) - np.roll(f, 1, axis=ax)) / (2.0 * h)
    if kind == "forward":
        return (np.roll(f, -1, axis=ax) - f) / h
    if kind == "backward":
        return (f - np.roll(f, 1, axis=ax)) / h
    raise ConfigError(f"unknown derivative kind {kind!r}")


def gradient(f, grid, kind: DerivKind = "spectral"):
    """Stack ``(d/dx f, d/dy f)`` along a new leading axis."""
    return np.stack([derivative(f, grid, 0, kind), derivative(f, grid, 1, kind)])


def divergence(F, grid, kind: DerivKind = "spectral"):
    """Divergence of a vector field ``F`` with leading component axis of length 2."""
    return derivative(F[0], grid, 0, kind) + derivative(F[1], grid, 1, kind)


def divergence_sym(T, grid, kind: DerivKind = "spectral"):
    """Row-wise divergence of a symmetric tensor stored as ``(xx, xy, yy)``."""
    return np.stack(
        [
            derivative(T[0], grid, 0, kind) + derivative(T[1], grid, 1, kind),
            derivative(T[1], grid, 0, kind) + derivative(T[2], grid, 1, kind),
        ]
    )


def fft_convolve_v(a, b, grid: VelocityGrid):
    """Circular convolution ``dv^2 * sum_m a[m] b[k-m]`` on the velocity grid.

    Leading axes of ``a`` and ``b`` broadcast against each other.
    """
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape[-2:] != grid.shape or b.shape[-2:] != grid.shape:
        raise GridMismatchError("convolution operands must live on the velocity grid")
    ah = sfft.rfft2(a, axes=(-2, -1))
    bh = sfft.rfft2(b, axes=(-2, -1))
    return sfft.irfft2(ah * bh, s=grid.shape, axes=(-2, -1)) * grid.weight


def periodic_offsets(grid: VelocityGrid):
    """Signed node offsets ``d*dv`` in FFT order, ``d`` wrapped to ``[-n/2, n/2)``."""
    n = grid.nv
    d = np.arange(n)
    d = np.where(d < (n + 1) // 2, d, d - n)
    return d * grid.dv


@lru_cache(maxsize=16)
def _gaussian_kernel_hat(nv, av, bv, centered):
    grid = VelocityGrid(nv, av, bv, centered)
    o = periodic_offsets(grid)
    kern = np.exp(-0.5 * (o[:, None] ** 2 + o[None, :] ** 2))
    kh = sfft.rfft2(kern)
    kh.setflags(write=False)
    return kh


def gaussian_kernel(grid: VelocityGrid):
    """``exp(-|o|^2/2)`` sampled at the signed offsets, in FFT (offset) layout."""
    o = periodic_offsets(grid)
    return np.exp(-0.5 * (o[:, None] ** 2 + o[None, :] ** 2))


def convolve_gaussian(a, grid: VelocityGrid):
    """``(a * exp(-|v|^2/2))`` evaluated at the velocity nodes (batched over leading axes)."""
    kh = _gaussian_kernel_hat(grid.nv, grid.av, grid.bv, grid.centered)
    ah = sfft.rfft2(a, axes=(-2, -1))
    return sfft.irfft2(ah * kh, s=grid.shape, axes=(-2, -1)) * grid.weight
