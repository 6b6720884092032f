"""First-order projector-splitting step (K, S, L) with IMEX relaxation.

Coefficient arrays put the component index first: ``c1`` has shape
``(2, r, r)``, ``cstar`` ``(3, r, r)`` in ``(xx, xy, yy)`` order, the
spatial ``d1`` / ``dss`` ``(2, r, r)`` and ``dsss`` ``(2, 2, r, r)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ConfigError, SingularSStepError
from .grids import SpatialGrid, VelocityGrid, derivative, gradient
from .lowrank import LowRankState, qr_orthonormalize_v, qr_orthonormalize_x
from .maxwell import MomentState, build_conv_tables, velocity_gradient
from .moment_solver import euler_moment_step, moment_rhs, nt_staggered_full_step

log = logging.getLogger(__name__)

Disc = Literal["spectral", "scfd"]
Limiter = Literal["upwind", "lax-wendroff", "van-leer"]

# above this the S-step solve is reported; at infinity it is refused
COND_WARN = 1e8


@dataclass(frozen=True)
class VelocityCoeffs:
    c1: np.ndarray
    cstar: np.ndarray
    Vbar: np.ndarray


@dataclass(frozen=True)
class MScriptFields:
    """``M = M1 + v.M2 + (v v):M3``; ``M3[a, b] = d u_a / d x_b``."""

    M1: np.ndarray
    M2: np.ndarray
    M3: np.ndarray


@dataclass(frozen=True)
class SpatialCoeffs:
    d1: np.ndarray
    dstar: np.ndarray
    dss: np.ndarray
    dsss: np.ndarray
    Xbar: np.ndarray
    R: np.ndarray


@dataclass(frozen=True)
class KnudsenField:
    """Strictly positive Knudsen number, either a scalar or a spatial field."""

    eps: np.ndarray | float

    def __post_init__(self):
        if not np.all(np.asarray(self.eps) > 0):
            raise ConfigError("Knudsen number must be positive everywhere")

    @property
    def is_constant(self):
        return np.ndim(self.eps) == 0


def _as_knudsen(eps):
    return eps if isinstance(eps, KnudsenField) else KnudsenField(eps)


def velocity_coeffs(V, vgrid: VelocityGrid) -> VelocityCoeffs:
    r = V.shape[0]
    v1, v2 = vgrid.mesh()
    Vf = V.reshape(r, -1)
    w = vgrid.weight

    def g(weight):
        return (Vf * weight.ravel()) @ Vf.T * w

    c1 = np.stack([g(v1), g(v2)])
    cstar = np.stack([g(v1 * v1), g(v1 * v2), g(v2 * v2)])
    Vbar = Vf.sum(axis=1) * w
    return VelocityCoeffs(c1, cstar, Vbar)


def mscript_fields(mom: MomentState, I1, I2, grid: SpatialGrid, kind="spectral") -> MScriptFields:
    rho, u = mom.rho, mom.u
    net = I2 - I1 * u
    M1 = (I1 - np.sum(u * net, axis=0)) / rho
    M2 = (gradient(rho, grid, kind) + net) / rho - 0.5 * gradient(np.sum(u * u, axis=0), grid, kind)
    M3 = velocity_gradient(u, grid, kind)
    return MScriptFields(M1, M2, M3)


def _cstar_full(cstar):
    """Expand ``(xx, xy, yy)`` storage to a ``(2, 2, r, r)`` array."""
    return np.stack([np.stack([cstar[0], cstar[1]]), np.stack([cstar[1], cstar[2]])])


def c2_coeffs(vc: VelocityCoeffs, m: MScriptFields):
    """``c2[j, l](x) = delta_jl M1 + c1_jl . M2 + cstar_jl : M3`` with shape ``(r, r, nx, ny)``."""
    r = vc.Vbar.size
    cs = _cstar_full(vc.cstar)
    out = np.einsum("mjl,mxy->jlxy", vc.c1, m.M2)
    out += np.einsum("abjl,abxy->jlxy", cs, m.M3)
    out[np.arange(r), np.arange(r)] += m.M1
    return out


def _relaxation(rho, eps, dt):
    a = dt * rho / eps
    return a, 1.0 / (1.0 + a), a / (1.0 + a)


def _imex_update(K, transport, c2, rho, eps, dt, Vbar):
    a, damp, gain = _relaxation(rho, eps, dt)
    reac = np.einsum("jlxy,lxy->jxy", c2, K)
    return damp * (K - dt * (transport + reac)) + gain * Vbar[:, None, None]


def k_step_spectral(state: LowRankState, vc: VelocityCoeffs, c2, rho, eps, dt):
    """IMEX update of ``K_j``; transport by Fourier spectral derivatives."""
    K = state.K()
    dK = gradient(K, state.xgrid, "spectral")  # (2, r, nx, ny)
    transport = np.einsum("mjl,mlxy->jxy", vc.c1, dK)
    return _imex_update(K, transport, c2, rho, _eps_value(eps), dt, vc.Vbar)


def _eps_value(eps):
    return eps.eps if isinstance(eps, KnudsenField) else eps


def characteristic_basis(c):
    """Rows of ``T`` are eigenvectors of the symmetric ``c`` (``T c T^T = diag(lam)``).

    Each eigenvector is signed so that its largest-magnitude entry is positive.
    """
    lam, Q = np.linalg.eigh(0.5 * (c + c.T))
    T = Q.T
    idx = np.argmax(np.abs(T), axis=1)
    sign = np.sign(T[np.arange(T.shape[0]), idx])
    sign[sign == 0] = 1.0
    return lam, T * sign[:, None]


def _van_leer(d, d_up):
    # phi(theta) * d with theta = d_up / d, written without the division
    return (d_up * np.abs(d) + np.abs(d_up) * d) / (np.abs(d) + np.abs(d_up) + 1e-300)


def advect_1d(q, lam, dt, h, axis, limiter: Limiter = "van-leer"):
    """Conservative approximation of ``lam * dq/dx`` along ``axis`` for constant ``lam``.

    Upwind flux plus, unless ``limiter == "upwind"``, the Lax--Wendroff
    correction limited with van Leer (or unlimited for ``"lax-wendroff"``).
    """
    d = q - np.roll(q, 1, axis=axis)  # d[i] = q_i - q_{i-1}  (interface i-1/2)
    if lam >= 0:
        flux = lam * np.roll(q, 1, axis=axis)
        d_up = np.roll(d, 1, axis=axis)
    else:
        flux = lam * q
        d_up = np.roll(d, -1, axis=axis)
    if limiter != "upwind":
        nu = abs(lam) * dt / h
        if limiter == "lax-wendroff":
            lim = d
        elif limiter == "van-leer":
            lim = _van_leer(d, d_up)
        else:
            raise ConfigError(f"unknown limiter {limiter!r}")
        flux = flux + 0.5 * abs(lam) * (1.0 - nu) * lim
    return (np.roll(flux, -1, axis=axis) - flux) / h


def k_step_scfd(state: LowRankState, vc: VelocityCoeffs, c2, rho, eps, dt, limiter: Limiter = "van-leer"):
    """IMEX update of ``K_j`` with upwinding in the characteristic variables of ``c1``."""
    K = state.K()
    grid = state.xgrid
    transport = np.zeros_like(K)
    for m in range(2):
        lam, T = characteristic_basis(vc.c1[m])
        Kh = np.tensordot(T, K, axes=(1, 0))
        ax = -2 if m == 0 else -1
        h = grid.spacing(m)
        delta = np.stack([advect_1d(Kh[i], lam[i], dt, h, ax, limiter) for i in range(lam.size)])
        transport += np.tensordot(T.T, delta, axes=(1, 0))
    return _imex_update(K, transport, c2, rho, _eps_value(eps), dt, vc.Vbar)


def spatial_coeffs(X, m: MScriptFields, rho, eps, grid: SpatialGrid, kind="spectral") -> SpatialCoeffs:
    """Spatial integrals driving the S and L steps; ``1/eps(x)`` is folded into ``Xbar`` and ``R``."""
    r = X.shape[0]
    w = grid.weight
    Xf = X.reshape(r, -1)
    dX = np.stack([derivative(X, grid, a, kind).reshape(r, -1) for a in range(2)])

    def g(field):
        return (Xf * np.ravel(field)) @ Xf.T * w

    d1 = np.stack([Xf @ dX[a].T * w for a in range(2)])
    dstar = g(m.M1)
    dss = np.stack([g(m.M2[a]) for a in range(2)])
    dsss = np.stack([np.stack([g(m.M3[a, b]) for b in range(2)]) for a in range(2)])
    weight = np.broadcast_to(rho / _eps_value(eps), grid.shape)
    Xbar = Xf @ weight.ravel() * w
    R = g(weight)
    return SpatialCoeffs(d1, dstar, dss, dsss, Xbar, R)


def s_step(S1, vc: VelocityCoeffs, sc: SpatialCoeffs, dt):
    """Implicit-explicit update of the coupling matrix (backward S flow)."""
    r = S1.shape[0]
    cs = _cstar_full(vc.cstar)
    rhs = S1.copy()
    expl = sc.dstar @ S1
    for a in range(2):
        expl += (sc.d1[a] + sc.dss[a]) @ S1 @ vc.c1[a].T
        for b in range(2):
            expl += sc.dsss[a, b] @ S1 @ cs[a, b].T
    rhs += dt * expl - dt * np.outer(sc.Xbar, vc.Vbar)
    A = np.eye(r) - dt * sc.R
    cond = np.linalg.cond(A)
    if not np.isfinite(cond):
        raise SingularSStepError(cond)
    if cond > COND_WARN:
        log.warning("S-step matrix ill-conditioned (cond = %.3e)", cond)
    return np.linalg.solve(A, rhs)


def l_step(S2, V, vc: VelocityCoeffs, sc: SpatialCoeffs, dt, vgrid: VelocityGrid):
    """Implicit-explicit update of ``L_i = sum_j S2_ij V_j``; returns ``L`` at the new time."""
    r = S2.shape[0]
    v1, v2 = (c.ravel() for c in vgrid.mesh())
    L = (S2 @ V.reshape(r, -1))
    lin = [sc.d1[a] + sc.dss[a] for a in range(2)]
    quad = (sc.dsss[0, 0], sc.dsss[0, 1] + sc.dsss[1, 0], sc.dsss[1, 1])
    expl = sc.dstar @ L
    expl += (lin[0] @ L) * v1 + (lin[1] @ L) * v2
    expl += (quad[0] @ L) * (v1 * v1) + (quad[1] @ L) * (v1 * v2) + (quad[2] @ L) * (v2 * v2)
    rhs = L - dt * expl + dt * sc.Xbar[:, None]
    Lnew = np.linalg.solve(np.eye(r) + dt * sc.R, rhs)
    return Lnew.reshape(V.shape)


@dataclass(frozen=True)
class StepOptions:
    disc: Disc = "spectral"
    limiter: Limiter = "van-leer"
    conservative_moments: bool = True


def full_step(state: LowRankState, mom: MomentState, eps, dt, disc: Disc = "spectral", limiter: Limiter = "van-leer",
              conservative_moments: bool = True):
    """Advance ``(rho, u)`` and the low-rank factors by one first-order step."""
    if dt <= 0:
        raise ConfigError(f"dt must be positive, got {dt}")
    if disc not in ("spectral", "scfd"):
        raise ConfigError(f"unknown discretization {disc!r}")
    eps = _eps_value(eps)
    xgrid, vgrid = state.xgrid, state.vgrid
    kind = "spectral" if disc == "spectral" else "central"

    # Step 1: moments, from time-n quantities
    table = build_conv_tables(state.V, vgrid)
    I1, I2 = moment_rhs(state, mom, table, kind)
    if disc == "spectral":
        mom_new = euler_moment_step(mom, I1, I2, dt, conservative=conservative_moments)
    else:
        U = nt_staggered_full_step(mom.conserved(), state, table, dt)
        mom_new = MomentState.from_conserved(U)

    # Step 2: K, S, L with coefficients built from rho^n, u^n, I1^n, I2^n
    vc = velocity_coeffs(state.V, vgrid)
    m = mscript_fields(mom, I1, I2, xgrid, kind)
    c2 = c2_coeffs(vc, m)
    if disc == "spectral":
        K = k_step_spectral(state, vc, c2, mom.rho, eps, dt)
    else:
        K = k_step_scfd(state, vc, c2, mom.rho, eps, dt, limiter)
    X, S1 = qr_orthonormalize_x(K, xgrid)
    sc = spatial_coeffs(X, m, mom.rho, eps, xgrid, "spectral" if disc == "spectral" else "forward")
    S2 = s_step(S1, vc, sc, dt)
    L = l_step(S2, state.V, vc, sc, dt, vgrid)
    V, S = qr_orthonormalize_v(L, vgrid)
    return LowRankState(X, S, V, xgrid, vgrid), mom_new
