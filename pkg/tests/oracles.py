"""Independent brute-force references used by several test modules."""

import numpy as np

from dlrbgk.grids import gaussian_kernel


def circulant_2d(kern):
    """Dense matrix ``C[(k1,k2),(m1,m2)] = kern[(k1-m1) % n, (k2-m2) % n]``."""
    n = kern.shape[0]
    k = np.arange(n)
    d = (k[:, None] - k[None, :]) % n
    return kern[d[:, None, :, None], d[None, :, None, :]].reshape(n * n, n * n)


def direct_gaussian_convolution(a, vgrid):
    C = circulant_2d(gaussian_kernel(vgrid))
    flat = a.reshape(-1, vgrid.nv**2)
    return (flat @ C.T).reshape(a.shape) * vgrid.weight


def dense_maxwellian_moments(g, rho, u, vgrid):
    """``<v M g>`` and ``<v (x) v M g>`` by summing the full phase-space array ``g[x, y, v, w]``."""
    v1, v2 = vgrid.mesh()
    M = rho[..., None, None] / (2 * np.pi) * np.exp(
        -0.5 * ((v1 - u[0][..., None, None]) ** 2 + (v2 - u[1][..., None, None]) ** 2)
    )
    w = vgrid.weight
    Mg = M * g

    def q(weight):
        return np.sum(weight * Mg, axis=(-2, -1)) * w

    return np.stack([q(v1), q(v2)]), np.stack([q(v1 * v1), q(v1 * v2), q(v2 * v2)]), q(np.ones_like(v1))
