"""Rank-r factorisation ``g = sum_ij X_i S_ij V_j`` and its orthonormalisation."""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import count

import numpy as np

from .errors import ConfigError, GridMismatchError
from .grids import SpatialGrid, VelocityGrid

# relative column norm below which a QR input direction counts as dependent
RANK_TOL = 1e-10


@dataclass(frozen=True)
class LowRankState:
    """Immutable snapshot of the low-rank factors.

    ``X`` has shape ``(r, nx, ny)`` and is orthonormal in the spatial
    quadrature inner product, ``V`` has shape ``(r, nv, nv)`` and is
    orthonormal in the velocity one, ``S`` is the dense ``(r, r)`` coupling.
    """

    X: np.ndarray
    S: np.ndarray
    V: np.ndarray
    xgrid: SpatialGrid
    vgrid: VelocityGrid

    def __post_init__(self):
        r = self.S.shape[0]
        if r < 1 or self.S.shape != (r, r):
            raise ConfigError(f"S must be a square matrix with r >= 1, got {self.S.shape}")
        if self.X.shape != (r,) + self.xgrid.shape:
            raise GridMismatchError(f"X has shape {self.X.shape}, expected {(r,) + self.xgrid.shape}")
        if self.V.shape != (r,) + self.vgrid.shape:
            raise GridMismatchError(f"V has shape {self.V.shape}, expected {(r,) + self.vgrid.shape}")

    @property
    def rank(self):
        return self.S.shape[0]

    def K(self):
        """``K_j = sum_i X_i S_ij``."""
        return np.tensordot(self.S, self.X, axes=(0, 0))

    def L(self):
        """``L_i = sum_j S_ij V_j``."""
        return np.tensordot(self.S, self.V, axes=(1, 0))

    def with_factors(self, **kw):
        return replace(self, **kw)

    def full(self):
        """Dense ``g`` of shape ``(nx, ny, nv, nv)``; only for small grids."""
        return np.einsum("ixy,ij,jab->xyab", self.X, self.S, self.V)


@dataclass(frozen=True)
class SeparableTerm:
    """One product ``x_factor(x) * v_factor(v)`` of an initial condition."""

    x_factor: np.ndarray
    v_factor: np.ndarray


def _fourier_candidates(grid):
    """Deterministic real Fourier modes on a periodic 2D grid, low frequencies first."""
    if isinstance(grid, SpatialGrid):
        c1, c2 = grid.x, grid.y
        L1, L2 = grid.lengths()
        o1, o2 = grid.ax, grid.ay
    else:
        c1 = c2 = grid.v
        L1 = L2 = grid.bv - grid.av
        o1 = o2 = grid.av
    t1 = 2.0 * np.pi * (c1 - o1) / L1
    t2 = 2.0 * np.pi * (c2 - o2) / L2
    yield np.ones(grid.shape)
    for level in count(1):
        for k1 in range(level + 1):
            k2 = level - k1
            for f1 in (np.cos, np.sin):
                for f2 in (np.cos, np.sin):
                    if (k1 == 0 and f1 is np.sin) or (k2 == 0 and f2 is np.sin):
                        continue
                    yield np.outer(f1(k1 * t1), f2(k2 * t2))
        if level > 4 * max(grid.shape):
            raise RuntimeError("ran out of completion candidates")


def weighted_qr(F, grid):
    """QR factorisation of the stack ``F`` (columns ``F[j]``) in the weighted inner product.

    Returns ``(Q, R)`` with ``F[j] = sum_i Q[i] R[i, j]``, ``Q`` orthonormal
    under the grid quadrature, ``R`` upper triangular with a nonnegative
    diagonal.  Numerically dependent columns get ``R[j, j] = 0`` and a
    Fourier-mode completion vector in ``Q[j]``.
    """
    F = np.asarray(F, dtype=float)
    r = F.shape[0]
    sw = np.sqrt(grid.weight)
    A = F.reshape(r, -1) * sw
    Q = np.zeros_like(A)
    R = np.zeros((r, r))
    scale = max(float(np.max(np.linalg.norm(A, axis=1))), np.finfo(float).tiny)
    deficient = []
    for j in range(r):
        w = A[j].copy()
        if j:
            c = Q[:j] @ w
            w -= c @ Q[:j]
            c2 = Q[:j] @ w
            w -= c2 @ Q[:j]
            R[:j, j] = c + c2
        nrm = np.linalg.norm(w)
        if nrm > RANK_TOL * scale:
            Q[j] = w / nrm
            R[j, j] = nrm
        else:
            deficient.append(j)
            Q[j] = _completion(Q, j, grid, sw)
    Qf = (Q / sw).reshape(F.shape)
    return Qf, R


def _completion(Q, j, grid, sw):
    for cand in _fourier_candidates(grid):
        w = cand.ravel() * sw
        w /= np.linalg.norm(w)
        for _ in range(2):
            if j:
                w = w - (Q[:j] @ w) @ Q[:j]
        nrm = np.linalg.norm(w)
        if nrm > 0.1:
            return w / nrm
    raise RuntimeError("no completion vector found")


def qr_orthonormalize_x(K, grid: SpatialGrid):
    """``K_j = sum_i X_i S_ij`` with ``X`` orthonormal; returns ``(X, S)``."""
    return weighted_qr(K, grid)


def qr_orthonormalize_v(L, grid: VelocityGrid):
    """``L_i = sum_j S_ij V_j`` with ``V`` orthonormal; returns ``(V, S)``."""
    V, R = weighted_qr(L, grid)
    return V, R.T


def init_from_separable(terms, r, xgrid: SpatialGrid, vgrid: VelocityGrid) -> LowRankState:
    """Build a rank-``r`` state from ``g = sum_t a_t(x) b_t(v)``.

    Exact when ``r`` is at least the number of independent terms (extra
    directions are orthonormal completions with zero coupling), otherwise the
    best rank-``r`` truncation in the phase-space L2 norm.
    """
    if r < 1:
        raise ConfigError(f"rank must be >= 1, got {r}")
    if not terms:
        raise ConfigError("need at least one separable term")
    A = np.stack([np.broadcast_to(t.x_factor, xgrid.shape) for t in terms]).astype(float)
    B = np.stack([np.broadcast_to(t.v_factor, vgrid.shape) for t in terms]).astype(float)
    m = len(terms)
    Qa, Ra = weighted_qr(A, xgrid)
    Qb, Rb = weighted_qr(B, vgrid)
    U, sig, Wt = np.linalg.svd(Ra @ Rb.T)
    Xr = np.tensordot(U.T, Qa, axes=(1, 0))
    Vr = np.tensordot(Wt, Qb, axes=(1, 0))
    k = min(r, m)
    X = np.zeros((r,) + xgrid.shape)
    V = np.zeros((r,) + vgrid.shape)
    X[:k] = Xr[:k]
    V[:k] = Vr[:k]
    S = np.zeros((r, r))
    S[np.arange(k), np.arange(k)] = sig[:k]
    # zero singular values leave the corresponding directions undetermined; refresh them
    # together with the padding through the completion path of the QR
    live = np.zeros(r, dtype=bool)
    live[:k] = sig[:k] > RANK_TOL * max(sig[0], np.finfo(float).tiny)
    X[~live] = 0.0
    V[~live] = 0.0
    S[~live, :] = 0.0
    X, Rx = weighted_qr(X, xgrid)
    V, Rv = weighted_qr(V, vgrid)
    S = Rx @ S @ Rv.T
    return LowRankState(X, S, V, xgrid, vgrid)


def constant_state(r, xgrid: SpatialGrid, vgrid: VelocityGrid, value=1.0) -> LowRankState:
    """Rank-``r`` representation of ``g(x, v) = value``."""
    return init_from_separable(
        [SeparableTerm(np.full(xgrid.shape, value), np.ones(vgrid.shape))], r, xgrid, vgrid
    )


def deviation_from_equilibrium(state: LowRankState, rows_per_chunk=None):
    """``max |g - 1|`` over the full phase-space grid, streamed over x rows."""
    return float(np.max(local_deviation(state, rows_per_chunk)))


def local_deviation(state: LowRankState, rows_per_chunk=None):
    """``max_v |g(x, v) - 1|`` for every spatial node, shape ``(nx, ny)``."""
    r = state.rank
    nvv = state.vgrid.nv**2
    K = state.K().reshape(r, -1)
    Vf = state.V.reshape(r, nvv)
    npts = K.shape[1]
    if rows_per_chunk is None:
        rows_per_chunk = max(1, int(4_000_000 // nvv))
    out = np.empty(npts)
    for s in range(0, npts, rows_per_chunk):
        blk = K[:, s : s + rows_per_chunk].T @ Vf
        out[s : s + rows_per_chunk] = np.max(np.abs(blk - 1.0), axis=1)
    return out.reshape(state.xgrid.shape)


def evaluate_g(state: LowRankState, ix, iy):
    """``g`` at spatial node ``(ix, iy)`` as a ``(nv, nv)`` array."""
    k = state.S.T @ state.X[:, ix, iy]
    return np.tensordot(k, state.V, axes=(0, 0))
