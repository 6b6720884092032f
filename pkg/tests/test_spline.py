import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dlrbgk.spline import bspline_weights, coefficients_2d, contract_2d, evaluate_2d, natural_prefilter


def test_weights_partition_of_unity():
    s = np.linspace(0, 0.999, 17)
    np.testing.assert_allclose(bspline_weights(s).sum(axis=-1), 1.0, atol=1e-15)


def test_interpolates_node_values(rng):
    F = rng.standard_normal((9, 7))
    C = coefficients_2d(F)
    t1, t2 = np.meshgrid(np.arange(9.0), np.arange(7.0), indexing="ij")
    np.testing.assert_allclose(evaluate_2d(C, t1, t2), F, atol=1e-12)


def test_reproduces_bilinear_functions():
    n1, n2 = 10, 12
    i, j = np.meshgrid(np.arange(n1), np.arange(n2), indexing="ij")
    F = 2.0 + 0.5 * i - 0.25 * j + 0.1 * i * j
    C = coefficients_2d(F)
    t1 = np.array([0.3, 4.75, 8.999])
    t2 = np.array([10.5, 0.01, 6.2])
    np.testing.assert_allclose(evaluate_2d(C, t1, t2), 2.0 + 0.5 * t1 - 0.25 * t2 + 0.1 * t1 * t2, atol=1e-12)


def test_natural_end_conditions():
    P = natural_prefilter(6)
    c = P @ np.arange(6.0) ** 2
    assert c[0] - 2 * c[1] + c[2] == pytest.approx(0.0, abs=1e-12)
    assert c[-1] - 2 * c[-2] + c[-3] == pytest.approx(0.0, abs=1e-12)


def test_smooth_function_converges_at_least_second_order():
    errs = []
    for n in (16, 32):
        x = np.linspace(-1, 1, n)
        h = x[1] - x[0]
        F = np.exp(-np.add.outer(x**2, 2 * x**2))
        C = coefficients_2d(F)
        q = np.array([0.1234, -0.377, 0.5])
        p = np.array([-0.21, 0.05, 0.33])
        val = evaluate_2d(C, (q + 1) / h, (p + 1) / h)
        errs.append(np.max(np.abs(val - np.exp(-(q**2) - 2 * p**2))))
    # natural end conditions limit the global order to about two near the ends
    assert errs[1] < errs[0] / 4


@given(st.integers(1, 4), st.integers(1, 3))
def test_contract_matches_evaluate(r, nc):
    rng = np.random.default_rng(r * 10 + nc)
    C = rng.standard_normal((10, 9, r, nc))
    t1 = rng.uniform(0, 7.99, (5, 4))
    t2 = rng.uniform(0, 6.99, (5, 4))
    K = rng.standard_normal((r, 5, 4))
    ref = np.einsum("xyjc,jxy->cxy", evaluate_2d(C, t1, t2), K)
    np.testing.assert_allclose(contract_2d(C, t1, t2, K), ref, atol=1e-12)
