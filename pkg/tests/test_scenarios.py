import numpy as np
import pytest

from dlrbgk.grids import SpatialGrid, VelocityGrid, make_grids
from dlrbgk.lowrank import deviation_from_equilibrium
from dlrbgk.scenarios import (
    beam_init,
    beam_profile,
    epsilon_field,
    explosion_init,
    reynolds_to_eps,
    shear_flow_init,
)


def test_shear_flow_values():
    xg, vg = make_grids(64, 64, 8)
    mom, s = shear_flow_init(xg, vg, 3)
    assert mom.u[0, 0, 16] == pytest.approx(0.0, abs=1e-15)  # y = 1/4
    assert mom.u[0, 0, 0] == pytest.approx(0.1 * np.tanh(-7.5))
    assert mom.u[1, 16, 0] == pytest.approx(5e-3)
    assert deviation_from_equilibrium(s) < 1e-12
    assert reynolds_to_eps(1000) == pytest.approx(1e-4)


def test_explosion_values():
    xg, vg = make_grids(128, 128, 8, -1.5, 1.5, -1.5, 1.5)
    mom, _ = explosion_init(xg, vg, 1)
    assert mom.rho[64, 64] == 1.0  # node at the origin
    assert mom.rho[0, 0] == 0.1
    X, Y = xg.mesh()
    inside = (X**2 + Y**2 <= 1e-4).sum()
    assert mom.rho.sum() * xg.weight == pytest.approx(0.1 * 9 + 0.9 * inside * xg.weight)
    assert np.all(mom.u == 0)


def test_beam_point_value_on_grid_containing_beam_centre():
    # centred nodes av + (k + 1/2) dv hit (4, 2) for this choice of bounds
    xg = SpatialGrid(4, 4)
    vg = VelocityGrid(64, -8.125, 7.875)
    mom, s = beam_init(xg, vg, 2)
    a, b = np.argmin(np.abs(vg.v - 4.0)), np.argmin(np.abs(vg.v - 2.0))
    assert vg.v[a] == 4.0 and vg.v[b] == 2.0
    g = s.full()[0, 0]
    assert g[a, b] == pytest.approx(1 + 1e-3 * np.exp(10.0), rel=1e-12)
    np.testing.assert_allclose(s.full(), np.broadcast_to(1 + beam_profile(vg), s.full().shape), rtol=1e-12)


def test_beam_maximum_deviation_matches_dense_oracle():
    xg = SpatialGrid(4, 4)
    vg = VelocityGrid(128, -8, 8)
    _, s = beam_init(xg, vg, 2)
    # analytic maximiser of the exponent is (v_b, w_b) / (1 - T_b)
    vv = np.linspace(-8, 8, 4001)
    V1, V2 = np.meshgrid(vv, vv, indexing="ij")
    dense_max = np.max(1e-3 * np.exp(-((V1 - 4) ** 2 + (V2 - 2) ** 2) / 0.2 + (V1**2 + V2**2) / 2))
    assert dense_max == pytest.approx(1e-3 * np.exp(0.5 * 20 / 0.9), rel=1e-3)
    grid_max = np.max(beam_profile(vg))
    assert deviation_from_equilibrium(s) == pytest.approx(grid_max, rel=1e-10)
    assert grid_max <= dense_max


def test_beam_density_by_dense_quadrature():
    vg = VelocityGrid(256, -8, 8)
    v1, v2 = vg.mesh()
    M = np.exp(-(v1**2 + v2**2) / 2) / (2 * np.pi)
    rho_f = np.sum(M * (1 + beam_profile(vg))) * vg.weight
    assert rho_f == pytest.approx(1 + 1e-3 * 0.1, rel=1e-8)


def test_epsilon_field_values():
    xg = SpatialGrid(40, 4, -1, 1, 0, 1)
    eps = epsilon_field(xg).eps
    i0 = np.argmin(np.abs(xg.x))
    assert eps[i0, 0] == pytest.approx(1e-4 + 2 * np.tanh(1.0))
    assert eps[0, 0] == pytest.approx(1e-4 + np.tanh(12.0) + np.tanh(-10.0))
    assert eps.min() > 0
