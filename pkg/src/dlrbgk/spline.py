"""Natural cubic B-spline interpolation on uniform grids (1D and tensor-product 2D)."""

from functools import lru_cache

import numpy as np
from numba import njit


@lru_cache(maxsize=32)
def natural_prefilter(n):
    """Matrix ``P`` of shape ``(n+2, n)`` mapping node values to padded B-spline coefficients.

    Coefficient ``c[k+1]`` multiplies the cubic B-spline centred on node ``k``;
    the two outer coefficients enforce zero second derivative at both ends.
    """
    A = np.zeros((n + 2, n + 2))
    for k in range(n):
        A[k + 1, k : k + 3] = (1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0)
    A[0, 0:3] = (1.0, -2.0, 1.0)
    A[n + 1, n - 1 : n + 2] = (1.0, -2.0, 1.0)
    rhs = np.zeros((n + 2, n))
    rhs[1 : n + 1] = np.eye(n)
    P = np.linalg.solve(A, rhs)
    P.setflags(write=False)
    return P


def coefficients_2d(F):
    """Padded tensor-product coefficients for node data ``F[..., n1, n2]``."""
    P1 = natural_prefilter(F.shape[-2])
    P2 = natural_prefilter(F.shape[-1])
    C = np.matmul(P1, F)
    return np.matmul(C, P2.T)


def bspline_weights(s):
    """Cubic B-spline weights for fractional offsets ``s`` in [0, 1); shape ``(..., 4)``."""
    s2 = s * s
    s3 = s2 * s
    return np.stack(
        [
            (1.0 - s) ** 3 / 6.0,
            (3.0 * s3 - 6.0 * s2 + 4.0) / 6.0,
            (-3.0 * s3 + 3.0 * s2 + 3.0 * s + 1.0) / 6.0,
            s3 / 6.0,
        ],
        axis=-1,
    )


def locate(t, n):
    """Split continuous node coordinates ``t`` into cell index and fraction."""
    i = np.clip(np.floor(t).astype(np.intp), 0, n - 2)
    return i, t - i


def evaluate_2d(C, t1, t2):
    """Evaluate padded coefficients ``C[n1+2, n2+2, ...]`` at node coordinates ``(t1, t2)``.

    Trailing axes of ``C`` are carried through; the result has shape
    ``t1.shape + C.shape[2:]``.
    """
    n1, n2 = C.shape[0] - 2, C.shape[1] - 2
    i1, s1 = locate(np.ravel(t1), n1)
    i2, s2 = locate(np.ravel(t2), n2)
    w1 = bspline_weights(s1)
    w2 = bspline_weights(s2)
    flat = C.reshape((n1 + 2) * (n2 + 2), -1)
    base = i1 * (n2 + 2) + i2
    out = np.zeros((i1.size, flat.shape[1]))
    for p in range(4):
        for q in range(4):
            w = w1[:, p] * w2[:, q]
            out += w[:, None] * flat.take(base + (p * (n2 + 2) + q), axis=0)
    return out.reshape(np.shape(t1) + C.shape[2:])


@njit(cache=True)
def _fill_weights(s, w):
    t = 1.0 - s
    w[0] = t * t * t / 6.0
    w[1] = (3.0 * s * s * s - 6.0 * s * s + 4.0) / 6.0
    w[2] = (-3.0 * s * s * s + 3.0 * s * s + 3.0 * s + 1.0) / 6.0
    w[3] = s * s * s / 6.0


@njit(cache=True)
def _contract_kernel(C, i1, s1, i2, s2, K, out):
    npts = i1.size
    r = C.shape[2]
    nc = C.shape[3]
    w1 = np.empty(4)
    w2 = np.empty(4)
    kp = np.empty(r)
    acc = np.empty(nc)
    for p in range(npts):
        _fill_weights(s1[p], w1)
        _fill_weights(s2[p], w2)
        a0 = i1[p]
        b0 = i2[p]
        for j in range(r):
            kp[j] = K[j, p]
        acc[:] = 0.0
        for a in range(4):
            for b in range(4):
                w = w1[a] * w2[b]
                blk = C[a0 + a, b0 + b]
                for j in range(r):
                    wk = w * kp[j]
                    for c in range(nc):
                        acc[c] += wk * blk[j, c]
        for c in range(nc):
            out[c, p] = acc[c]


def contract_2d(C, t1, t2, K):
    """``sum_j K[j] * s_{j,c}(t1, t2)`` for splines with padded coefficients ``C[n1+2, n2+2, r, nc]``.

    ``K`` has shape ``(r,) + t1.shape``; the result has shape ``(nc,) + t1.shape``.
    """
    n1, n2, r, nc = C.shape[0] - 2, C.shape[1] - 2, C.shape[2], C.shape[3]
    i1, s1 = locate(np.ravel(t1), n1)
    i2, s2 = locate(np.ravel(t2), n2)
    Kf = np.ascontiguousarray(np.reshape(K, (r, -1)), dtype=float)
    out = np.empty((nc, i1.size))
    _contract_kernel(np.ascontiguousarray(C), i1, s1, i2, s2, Kf, out)
    return out.reshape((nc,) + np.shape(t1))
