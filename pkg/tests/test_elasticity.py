import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from csmtunnel.elasticity import (FieldSample, MaterialParams, build_canonical_X, eval_fields, excavation_resultant,
                                  ground_split, initial_stress, jump_residuals, lanczos, mises, residual_report,
                                  rhs_harmonics, solve_series, total_fields)
from csmtunnel.errors import OutsideDomain, UpperHalfPlane


def annulus_points(sol, n_r=5, n_t=12):
    al = sol.alpha
    r = al + (1 - al) * np.linspace(0.1, 0.9, n_r)
    t = np.linspace(0.3, 2 * np.pi - 0.3, n_t)
    return (r[:, None] * np.exp(1j * t)[None, :]).ravel()


def test_material_table_values(table1):
    assert table1.G == pytest.approx(20e6 / 2.6)
    assert table1.kappa == pytest.approx(1.8)
    with pytest.raises(ValueError):
        MaterialParams(1.0, 0.5, 1.0, 1.0)


def test_initial_stress_at_depth(table1):
    s = initial_stress(table1, np.array([-10j, 3 - 10j]))
    np.testing.assert_allclose(s.sy, -200e3)
    np.testing.assert_allclose(s.sx, -160e3)
    assert np.all(s.txy == 0) and np.all(s.ux == 0)
    with pytest.raises(UpperHalfPlane):
        initial_stress(table1, np.array([1j]))


def test_circle_resultant(table1, shallow_circle):
    r = excavation_resultant(table1, shallow_circle.cavity)
    assert r["R_y"] == pytest.approx(20e3 * 25 * math.pi, rel=1e-14)
    assert r["K0_res"] == pytest.approx(-1j * r["R_y"] / (2 * math.pi))


def test_rhs_weightless_and_affine_in_kx(table1, shallow_horseshoe):
    zero = rhs_harmonics(table1.scaled(0.0), shallow_horseshoe, 20)
    assert zero.K0 == 0 and np.all(zero.I == 0) and np.all(zero.J == 0)
    mk = lambda kx: rhs_harmonics(MaterialParams(20e6, 0.3, 20e3, kx), shallow_horseshoe, 20, check=False)
    a, b, c = mk(0.0), mk(0.5), mk(1.0)
    np.testing.assert_allclose(b.J, 0.5 * (a.J + c.J), atol=1e-9 * np.abs(c.J).max())
    np.testing.assert_allclose(b.I, 0.5 * (a.I + c.I), atol=1e-9 * np.abs(c.I).max())


def test_extracted_K0_matches_area(table1, shallow_horseshoe):
    rhs = rhs_harmonics(table1, shallow_horseshoe, 10, check=False)
    ref = excavation_resultant(table1, shallow_horseshoe.cavity)["K0_res"]
    assert abs(rhs.K0 - ref) <= 1e-5 * abs(ref)


def test_ground_split(shallow_horseshoe):
    sp = ground_split(shallow_horseshoe)
    assert abs(abs(sp.t1) - 1) < 1e-15 and abs(abs(sp.t2) - 1) < 1e-15
    assert sp.deviation < 1e-5
    with pytest.raises(ValueError):
        ground_split(shallow_horseshoe, 5.0, -5.0)


def test_canonical_X_jumps(circle_solution):
    X = circle_solution.X
    assert max(X.jump_residual) <= 1e-8
    assert max(jump_residuals(X, 2048)) <= 1e-8
    assert X.a.real == pytest.approx(0.5 * X.s)


def test_canonical_X_without_contrast(shallow_circle):
    # kappa = 1 makes the fixed-arc relation X_in = -X_out, an exponent of exactly one half
    X = build_canonical_X(ground_split(shallow_circle), 1.0, shallow_circle.r_i)
    assert X.a.imag == 0 and abs(X.a.real) == 0.5
    sig = np.exp(1j * np.linspace(0.1, 6.2, 50))
    ratio = X.evaluate(sig * (1 - 1e-13), "in") / X.evaluate(sig * (1 + 1e-13), "out")
    np.testing.assert_allclose(np.abs(ratio), 1.0, rtol=1e-9)


def test_canonical_X_series_and_dlog(circle_solution):
    X = circle_solution.X
    for r, side in ((0.3, "in"), (0.5, "in"), (2.0, "out"), (3.0, "out")):
        z = r * np.exp(1j * np.linspace(0, 6, 7))
        direct = X.evaluate(z, side)
        np.testing.assert_allclose(X.series(z), direct, rtol=1e-10)
    z = 0.6 * np.exp(1j * np.linspace(0.2, 6, 7))
    h = 1e-6
    fd = (np.log(X.evaluate(z + h)) - np.log(X.evaluate(z - h))) / (2 * h)
    np.testing.assert_allclose(X.dlog(z), fd, rtol=1e-7)


def test_log_coefficient_pins(circle_solution, table1):
    sol = circle_solution
    k = table1.kappa
    assert sol.coefficient("A", -1) == pytest.approx(sol.K0_res / (1 + k), abs=1e-6)
    assert sol.coefficient("B", -1) == pytest.approx(-k * sol.K0_res / (1 + k), abs=1e-6)


def test_lanczos_factors():
    assert lanczos(40, 0) == 1.0
    assert abs(lanczos(40, 40)) < 1e-16
    k = np.arange(1, 40)
    np.testing.assert_array_equal(lanczos(40, k), lanczos(40, -k))


def test_mises_identities():
    s = FieldSample(None, np.zeros(1), np.array([-3.0]), np.array([-3.0]), np.zeros(1), None, None, None,
                    np.zeros(1), np.zeros(1))
    assert mises(s, 0.3)[0] == pytest.approx(3.0 * (1 - 0.6))
    t = FieldSample(None, np.zeros(1), np.zeros(1), np.zeros(1), np.array([2.0]), None, None, None,
                    np.zeros(1), np.zeros(1))
    assert mises(t, 0.3)[0] == pytest.approx(2.0 * math.sqrt(3))


def test_frame_invariants(circle_solution):
    f = eval_fields(circle_solution, zeta=annulus_points(circle_solution))
    np.testing.assert_allclose(f.srho + f.stheta, f.sx + f.sy, rtol=1e-12, atol=1e-9)
    np.testing.assert_allclose(f.srho * f.stheta - f.trt ** 2, f.sx * f.sy - f.txy ** 2, rtol=1e-9, atol=1e-3)


def test_mirror_symmetry(circle_solution):
    z = np.array([1 - 4j, 2.5 - 16j, 7 - 10j, 0.5 - 1j])
    a = eval_fields(circle_solution, z=z)
    b = eval_fields(circle_solution, z=-np.conj(z))
    scale = np.abs(a.ux).max() + np.abs(a.uy).max()
    np.testing.assert_allclose(b.ux, -a.ux, atol=1e-12 * scale)
    np.testing.assert_allclose(b.uy, a.uy, atol=1e-12 * scale)
    np.testing.assert_allclose(b.sy, a.sy, atol=1e-10 * np.abs(a.sy).max())
    np.testing.assert_allclose(b.txy, -a.txy, atol=1e-10 * np.abs(a.sy).max())


@settings(max_examples=5, deadline=None)
@given(st.floats(min_value=0.5, max_value=40.0))
def test_linear_in_unit_weight(shallow_circle, table1, factor):
    base = solve_series(shallow_circle, table1, n0=24)
    scaled = solve_series(shallow_circle, table1.scaled(table1.gamma * factor), n0=24)
    zeta = annulus_points(base, 3, 6)
    a, b = eval_fields(base, zeta=zeta), eval_fields(scaled, zeta=zeta)
    np.testing.assert_allclose(b.sx, factor * a.sx, rtol=1e-9, atol=1e-9 * np.abs(b.sx).max())
    np.testing.assert_allclose(b.ux, factor * a.ux, rtol=1e-9, atol=1e-9 * np.abs(b.ux).max())


def test_weightless_gives_zero_fields(shallow_circle, table1):
    sol = solve_series(shallow_circle, table1.scaled(0.0), n0=24)
    f = eval_fields(sol, zeta=annulus_points(sol, 3, 6))
    for arr in (f.sx, f.sy, f.txy, f.ux, f.uy):
        assert np.all(arr == 0)


def test_hooke_law_by_finite_differences(circle_solution, table1):
    sol = circle_solution
    z = np.array([3 - 4j, -6 - 12j, 8 - 9j])
    h = 1e-4
    f = eval_fields(sol, z=z)
    fx = [eval_fields(sol, z=z + s * h) for s in (1, -1)]
    fy = [eval_fields(sol, z=z + s * 1j * h) for s in (1, -1)]
    ex = (fx[0].ux - fx[1].ux) / (2 * h)
    ey = (fy[0].uy - fy[1].uy) / (2 * h)
    gxy = (fy[0].ux - fy[1].ux + fx[0].uy - fx[1].uy) / (2 * h)
    E, nu, G = table1.E, table1.nu, table1.G
    ex_h = ((1 - nu ** 2) * f.sx - nu * (1 + nu) * f.sy) / E
    ey_h = ((1 - nu ** 2) * f.sy - nu * (1 + nu) * f.sx) / E
    scale = np.max(np.abs([ex_h, ey_h]))
    np.testing.assert_allclose(ex, ex_h, atol=1e-5 * scale)
    np.testing.assert_allclose(ey, ey_h, atol=1e-5 * scale)
    np.testing.assert_allclose(gxy, f.txy / G, atol=1e-5 * scale)


def test_circle_boundary_residuals(circle_solution):
    s = residual_report(circle_solution).summary()
    assert s["cavity_traction_ratio"] <= 1e-2
    assert s["free_traction_ratio"] <= 1e-3
    assert s["fixed_displacement_ratio"] <= 1e-4
    assert s["resultant_error"] <= 1e-2


def test_cavity_is_traction_free(circle_solution):
    sol = circle_solution
    f = total_fields(sol, zeta=sol.alpha * np.exp(1j * np.linspace(0.1, 6.2, 40)))
    assert np.max(np.hypot(f.srho, f.trt)) <= 1e-2 * 200e3
    assert np.max(np.abs(f.stheta)) > 100e3


def test_series_form_tracks_closed_form(circle_solution):
    zeta = annulus_points(circle_solution)
    a = eval_fields(circle_solution, zeta=zeta)
    b = eval_fields(circle_solution, zeta=zeta, form="series")
    assert np.max(np.abs(a.ux - b.ux)) <= 0.05 * np.max(np.abs(a.ux))


def test_iterative_method_converges(shallow_circle, table1, circle_solution):
    it = solve_series(shallow_circle, table1, n0=40, method="iterative")
    assert it.converged and it.log[-1] <= 1e-10
    log = it.log
    assert all(log[k + 2] <= 0.5 * log[k] for k in range(2, len(log) - 2))
    zeta = annulus_points(it)
    a, b = eval_fields(it, zeta=zeta), eval_fields(circle_solution, zeta=zeta)
    assert np.max(np.abs(a.sx - b.sx)) <= 1e-5 * np.max(np.abs(b.sx))


def test_evaluation_domain(circle_solution):
    with pytest.raises(OutsideDomain):
        eval_fields(circle_solution, zeta=np.array([1.2 + 0j]))
    with pytest.raises(OutsideDomain):
        eval_fields(circle_solution, zeta=np.array([0.5 * circle_solution.alpha + 0j]))
    with pytest.raises(ValueError):
        eval_fields(circle_solution, zeta=np.array([0.5 + 0j]), form="bogus")


def test_solve_argument_checks(shallow_circle, table1):
    with pytest.raises(ValueError):
        solve_series(shallow_circle, table1, n0=4)
    with pytest.raises(ValueError):
        solve_series(shallow_circle, table1, n0=16, method="newton")


def test_solution_dict(circle_solution):
    d = circle_solution.to_dict()
    assert d["n0"] == 40 and d["method"] == "direct" and d["map_factor"] is True
    assert len(d["c"]) == 81
