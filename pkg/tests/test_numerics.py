import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from csmtunnel.errors import AliasWarning, SingularMatrix
from csmtunnel.geometry import build_boundary, discretize, Arc
from csmtunnel.numerics import (circle_grid, condition_number, fourier_coeffs, fourier_synthesis, solve_dense,
                                solve_dirichlet_csm)


def test_solve_identity_and_diagonal():
    b = np.array([1.0, -2.0, 3.0])
    np.testing.assert_array_equal(solve_dense(np.eye(3), b), b)
    np.testing.assert_allclose(solve_dense(np.diag([2.0, 4.0]), [2.0, 8.0]), [1.0, 2.0], rtol=1e-15)


def test_solve_matches_explicit_inverse(rng):
    a = rng.standard_normal((50, 50)) + 50 * np.eye(50)
    b = rng.standard_normal(50)
    np.testing.assert_allclose(solve_dense(a, b), np.linalg.inv(a) @ b, rtol=1e-10, atol=1e-12)


@pytest.mark.filterwarnings("ignore::scipy.linalg.LinAlgWarning")
def test_solve_singular():
    with pytest.raises(SingularMatrix):
        solve_dense(np.array([[1.0, 2.0], [2.0, 4.0]]), [1.0, 1.0])


def test_solve_backward_stability(rng):
    for _ in range(5):
        u, _ = np.linalg.qr(rng.standard_normal((40, 40)))
        v, _ = np.linalg.qr(rng.standard_normal((40, 40)))
        a = u @ np.diag(np.logspace(0, -8, 40)) @ v.T
        x = rng.standard_normal(40)
        err = np.linalg.norm(solve_dense(a, a @ x) - x) / np.linalg.norm(x)
        assert err <= 1e3 * 1e8 * np.finfo(float).eps


def test_condition_number_simple_cases():
    assert condition_number(np.eye(4)).cond == pytest.approx(1.0)
    assert condition_number(np.diag([10.0, 0.1])).cond == pytest.approx(100.0)
    t = 0.7
    rot = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
    assert condition_number(rot).cond == pytest.approx(1.0)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_condition_number_invariances(seed):
    r = np.random.default_rng(seed)
    a = r.standard_normal((6, 6))
    u, _ = np.linalg.qr(r.standard_normal((6, 6)))
    v, _ = np.linalg.qr(r.standard_normal((6, 6)))
    c = condition_number(a).cond
    assert condition_number(a.T).cond == pytest.approx(c, rel=1e-8)
    assert condition_number(u @ a @ v).cond == pytest.approx(c, rel=1e-8)


def test_fourier_basic_cases():
    s = circle_grid(16)
    c = fourier_coeffs(s ** 2, range(-7, 8))
    expect = np.zeros(15)
    expect[2 + 7] = 1
    np.testing.assert_allclose(c, expect, atol=1e-14)
    assert fourier_coeffs(np.full(16, 3.0), [0])[0] == pytest.approx(3.0)
    c = fourier_coeffs(2 * s + 1 / s, [1, -1])
    np.testing.assert_allclose(c, [2, 1], atol=1e-14)


def test_fourier_alias_warning():
    with pytest.warns(AliasWarning):
        fourier_coeffs(np.ones(16), [8])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), min_size=15,
                max_size=15))
def test_fourier_synthesis_roundtrip(coeffs):
    k = np.arange(-7, 8)
    vals = fourier_synthesis(coeffs, k, 16)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        back = fourier_coeffs(vals, k)
    np.testing.assert_allclose(back, coeffs, atol=1e-12)


def unit_circle():
    # counter-clockwise, so the charges sit outside and the interior problem is represented
    return discretize(build_boundary([Arc(0, 1, 0, 2 * np.pi)], orientation="ccw"), [64])


def test_dirichlet_zero_data():
    sol = solve_dirichlet_csm(unit_circle(), np.zeros(64))
    assert np.all(sol.charges == 0)
    assert sol(np.array([0.3 + 0.1j]))[0] == 0


def test_dirichlet_harmonic_polynomial():
    cs = unit_circle()
    # the interior error decays like R^-N with R the charge radius; offset 3 puts R at 1.29
    sol = solve_dirichlet_csm(cs, (cs.points ** 2).real, offset_factor=3.0)
    assert sol(np.array([0.5]))[0] == pytest.approx(0.25, abs=1e-8)
    coarse = solve_dirichlet_csm(cs, (cs.points ** 2).real, offset_factor=1.0)
    assert abs(coarse(np.array([0.5]))[0] - 0.25) < 1e-4


def test_dirichlet_single_source():
    cs = unit_circle()
    sol = solve_dirichlet_csm(cs, np.log(np.abs(cs.points - 3)), offset_factor=3.0)
    z = 0.6 * np.exp(1j * np.linspace(0, 6, 11))
    np.testing.assert_allclose(sol(z), np.log(np.abs(z - 3)), atol=1e-10)
