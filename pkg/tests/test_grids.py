import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dlrbgk.errors import ConfigError
from dlrbgk.grids import (
    SpatialGrid,
    VelocityGrid,
    convolve_gaussian,
    derivative,
    divergence,
    fft_convolve_v,
    gaussian_kernel,
    inner_v,
    inner_x,
    make_grids,
    periodic_offsets,
)


def direct_circular(a, b, dv):
    """O(n^4) reference: c_k = dv^2 sum_m a_m b_(k-m mod n)."""
    n = a.shape[0]
    c = np.zeros_like(a)
    for k1 in range(n):
        for k2 in range(n):
            s = 0.0
            for m1 in range(n):
                for m2 in range(n):
                    s += a[m1, m2] * b[(k1 - m1) % n, (k2 - m2) % n]
            c[k1, k2] = s
    return c * dv * dv


def test_grid_nodes_and_weights():
    g = SpatialGrid(8, 4, 0.0, 2.0, -1.0, 1.0)
    assert g.dx == 0.25 and g.dy == 0.5
    assert g.x[0] == 0.0 and g.x[-1] == pytest.approx(1.75)
    assert g.weight * g.nx * g.ny == pytest.approx(g.area)
    v = VelocityGrid(4, -2.0, 2.0)
    np.testing.assert_allclose(v.v, [-1.5, -0.5, 0.5, 1.5])
    assert np.allclose(VelocityGrid(4, -2.0, 2.0, centered=False).v, [-2, -1, 0, 1])


@pytest.mark.parametrize("kw", [dict(nx=3, ny=4), dict(nx=5, ny=4), dict(nx=4, ny=4, ax=1.0, bx=0.0)])
def test_bad_spatial_grid(kw):
    with pytest.raises(ConfigError):
        SpatialGrid(**kw)


def test_bad_velocity_grid():
    with pytest.raises(ConfigError):
        VelocityGrid(2)
    with pytest.raises(ConfigError):
        make_grids(8, 8, 0)


def test_inner_products():
    xg, vg = make_grids(8, 8, 8)
    assert inner_x(np.ones(xg.shape), np.ones(xg.shape), xg) == pytest.approx(1.0)
    assert inner_v(np.ones(vg.shape), np.ones(vg.shape), vg) == pytest.approx(144.0)


@pytest.mark.parametrize("axis", [0, 1])
def test_spectral_derivative_exact_for_modes(axis):
    g = SpatialGrid(16, 16, 0.0, 2.0, 0.0, 1.0)
    X, Y = g.mesh()
    c = (X, Y)[axis]
    L = g.lengths()[axis]
    f = np.sin(2 * np.pi * 3 * c / L) + np.cos(2 * np.pi * c / L)
    df = 2 * np.pi / L * (3 * np.cos(2 * np.pi * 3 * c / L) - np.sin(2 * np.pi * c / L))
    np.testing.assert_allclose(derivative(f, g, axis, "spectral"), df, atol=1e-11)


@pytest.mark.parametrize("kind,order", [("central", 2), ("forward", 1), ("backward", 1)])
def test_finite_difference_order(kind, order):
    errs = []
    for n in (32, 64):
        g = SpatialGrid(n, n)
        X, _ = g.mesh()
        f = np.sin(2 * np.pi * X)
        errs.append(np.max(np.abs(derivative(f, g, 0, kind) - 2 * np.pi * np.cos(2 * np.pi * X))))
    assert np.log2(errs[0] / errs[1]) == pytest.approx(order, abs=0.15)


def test_divergence_of_constant_field_is_zero():
    g = SpatialGrid(8, 8)
    F = np.ones((2,) + g.shape)
    assert np.max(np.abs(divergence(F, g))) < 1e-12


@pytest.mark.parametrize("n", [8, 16])
def test_fft_convolution_matches_direct_sum(n, rng):
    vg = VelocityGrid(n, -3.0, 3.0)
    a = rng.standard_normal(vg.shape)
    b = rng.standard_normal(vg.shape)
    ref = direct_circular(a, b, vg.dv)
    np.testing.assert_allclose(fft_convolve_v(a, b, vg), ref, rtol=1e-12, atol=1e-12 * np.max(np.abs(ref)))


def test_gaussian_kernel_layout():
    vg = VelocityGrid(8, -4.0, 4.0)
    k = gaussian_kernel(vg)
    off = periodic_offsets(vg)
    assert off[0] == 0.0 and k[0, 0] == 1.0
    assert k[1, 0] == pytest.approx(np.exp(-0.5 * vg.dv**2))
    assert k[-1, 0] == k[1, 0]


def test_convolve_gaussian_batched(rng):
    vg = VelocityGrid(8, -4.0, 4.0)
    a = rng.standard_normal((3, 2) + vg.shape)
    out = convolve_gaussian(a, vg)
    ref = direct_circular(a[2, 1], gaussian_kernel(vg), vg.dv)
    np.testing.assert_allclose(out[2, 1], ref, rtol=1e-12, atol=1e-13)


@given(st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))
def test_convolution_is_linear(alpha, beta):
    vg = VelocityGrid(8, -4.0, 4.0)
    r = np.random.default_rng(7)
    a, b = r.standard_normal((2,) + vg.shape)
    lhs = convolve_gaussian(alpha * a + beta * b, vg)
    rhs = alpha * convolve_gaussian(a, vg) + beta * convolve_gaussian(b, vg)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)
