import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from csmtunnel.errors import FilletTooLarge, GapError
from csmtunnel.geometry import (Arc, BoundarySpec, EllipticArc, Line, build_boundary, charge_points,
                                collocation_from_points, discretize, polygon_signed_area, quality_check,
                                round_corners, turning_number, winding_number)

from conftest import circle_points, horseshoe_spec


def square_spec(side=10.0):
    h = side / 2
    c = [h + 1j * h, h - 1j * h, -h - 1j * h, -h + 1j * h]
    return BoundarySpec(tuple(Line(c[k], c[(k + 1) % 4]) for k in range(4)))


def test_full_circle_is_one_segment():
    spec = build_boundary([Arc(0, 5, 0, 2 * math.pi)])
    assert len(spec.segments) == 1
    assert spec.orientation == "cw"
    assert spec.area == pytest.approx(25 * math.pi, rel=1e-14)


def test_horseshoe_spec_dimensions():
    spec = horseshoe_spec()
    assert len(spec.segments) == 4
    assert spec.orientation == "cw"
    # 3/4 disc of radius 5 plus the 5 x 5 quadrant minus the cut-off fillet corner
    exact = 0.75 * math.pi * 25 + 25 - (0.25 - math.pi * 0.25 / 4)
    assert spec.area == pytest.approx(exact, rel=1e-13)
    dense = discretize(spec, [3000, 800, 400, 800]).points
    assert abs(polygon_signed_area(dense)) == pytest.approx(exact, rel=1e-6)


def test_gap_is_rejected():
    with pytest.raises(GapError):
        build_boundary([Line(0, 1), Line(1.1, 0)])


def test_round_square_corners():
    spec = round_corners(square_spec(), 0.5)
    assert len(spec.segments) == 8
    lines = [s for s in spec.segments if isinstance(s, Line)]
    arcs = [s for s in spec.segments if isinstance(s, Arc)]
    assert all(s.length == pytest.approx(9.0, abs=1e-12) for s in lines)
    assert all(s.radius == 0.5 and abs(s.sweep) == pytest.approx(math.pi / 2) for s in arcs)
    for k, s in enumerate(spec.segments):
        nxt = spec.segments[(k + 1) % 8]
        assert abs(s.end_point - nxt.start_point) < 1e-12
        assert abs(complex(s.tangent(1.0)) - complex(nxt.tangent(0.0))) < 1e-12


def test_round_horseshoe_corner_gives_fillet_branch():
    raw = BoundarySpec((Arc(0, 5, 1.5 * math.pi, 0), Line(5, 5 - 5j), Line(5 - 5j, -5j)))
    spec = round_corners(raw, 0.5)
    fillet = [s for s in spec.segments if isinstance(s, Arc) and s.fillet][0]
    assert abs(fillet.center - (4.5 - 4.5j)) < 1e-12
    assert abs(fillet.start_point - (5 - 4.5j)) < 1e-12
    assert abs(fillet.end_point - (4.5 - 5j)) < 1e-12


def test_round_corners_identity_and_idempotent():
    spec = horseshoe_spec()
    assert round_corners(spec, 0.5) is spec
    once = round_corners(square_spec(), 0.5)
    twice = round_corners(once, 0.5)
    a = once.sample(16)
    b = twice.sample(16)
    assert np.max(np.abs(a - b)) <= 1e-12


def test_fillet_too_large():
    with pytest.raises(FilletTooLarge):
        round_corners(square_spec(1.0), 2.0)


def test_discretize_horseshoe_counts():
    cs = discretize(horseshoe_spec(), [120, 30, 20, 30])
    assert len(cs) == 200
    assert abs(cs.points[0] - (-5j)) < 1e-14


def test_discretize_unit_circle_four_points():
    cs = discretize(build_boundary([Arc(0, 1, 0, -2 * math.pi)]), [4])
    np.testing.assert_allclose(cs.points, [1, -1j, -1, 1j], atol=1e-15)


def test_translate_is_pointwise():
    cs = discretize(horseshoe_spec(), [120, 30, 20, 30])
    moved = cs.translated(-10j)
    np.testing.assert_array_equal(moved.points, cs.points - 10j)
    np.testing.assert_allclose(moved.midpoints(), cs.midpoints() - 10j, atol=1e-13)


def test_midpoints_lie_on_the_curve():
    cs = discretize(build_boundary([Arc(2, 5, 0, -2 * math.pi)]), [64])
    np.testing.assert_allclose(np.abs(cs.midpoints() - 2), 5.0, atol=1e-13)
    chord = cs.midpoints(true_curve=False)
    assert np.all(np.abs(chord - 2) < 5.0)


def test_perimeter_convergence_quadratic():
    spec = horseshoe_spec()
    errs = []
    for scale in (1, 2, 4):
        z = discretize(spec, [30 * scale, 8 * scale, 5 * scale, 8 * scale]).points
        chords = np.abs(np.roll(z, -1) - z).sum()
        errs.append(abs(chords - spec.perimeter) / spec.perimeter)
    assert errs[1] < errs[0] / 3.5 and errs[2] < errs[1] / 3.5


def test_elliptic_arc_length_matches_complete_integral():
    from scipy.special import ellipe
    arc = EllipticArc(0, 6, 5, 0.5 * math.pi, -0.5 * math.pi)
    # half perimeter of the ellipse: 2 a E(1 - b^2/a^2)
    assert arc.length == pytest.approx(2 * 6 * ellipe(1 - 25 / 36), rel=1e-13)
    t = np.linspace(0, 1, 9)
    p = arc.point(t)
    np.testing.assert_allclose((p.real / 6) ** 2 + (p.imag / 5) ** 2, 1.0, atol=1e-13)
    gaps = np.abs(np.diff(arc.point(np.linspace(0, 1, 401))))
    assert gaps.max() / gaps.min() < 1.0 + 1e-4


def test_bi_elliptic_area():
    spec = build_boundary([EllipticArc(-10j, 6, 5, 0.5 * math.pi, -0.5 * math.pi),
                           EllipticArc(-10j, 4, 5, 1.5 * math.pi, 0.5 * math.pi)])
    assert spec.orientation == "cw"
    assert spec.area == pytest.approx(0.5 * math.pi * 5 * (4 + 6), rel=1e-14)


def test_quality_uniform_circles():
    r90 = quality_check(circle_points(90))
    assert r90.max_angle_variation == pytest.approx(4.0, abs=1e-9)
    assert r90.max_relative_distance == pytest.approx(1 / 90, rel=1e-9)
    assert not r90.passed
    r128 = quality_check(circle_points(128))
    assert r128.max_angle_variation == pytest.approx(360 / 128, abs=1e-9)
    assert r128.passed


def test_quality_sharp_square_fails():
    cs = discretize(square_spec(), [50] * 4)
    rep = quality_check(cs)
    assert rep.max_angle_variation == pytest.approx(90.0, abs=1e-9)
    assert not rep.passed


def test_quality_benchmark_passes_angle_rule():
    cs = discretize(horseshoe_spec(), [120, 30, 20, 30])
    assert quality_check(cs).max_angle_variation <= 10.0


def test_charge_points_cw_circle_inside():
    z = charge_points(circle_points(64), 1.5)
    r = np.abs(z)
    assert np.all(r < 1.0)
    np.testing.assert_allclose(r, r[0], rtol=1e-13)


def test_charge_points_ccw_circle_outside():
    z = charge_points(np.exp(2j * np.pi * np.arange(90) / 90), 1.0)
    assert np.all(np.abs(z) > 1.0)


def test_charge_point_collinear_offset():
    h = 0.3
    pts = np.array([0, h, 2 * h, 1 + 5j, -1 + 5j], dtype=complex)
    z = charge_points(pts, 1.0)
    assert abs(z[1] - (h + h * np.exp(1j * (0 - np.pi / 2)))) < 1e-15


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=63), st.floats(min_value=0.2, max_value=3.0))
def test_charge_points_rotation_equivariant(m, k):
    base = circle_points(64)
    pts = base * (1 + 0.2 * np.cos(3 * np.angle(base)))
    a = charge_points(np.roll(pts, m), k)
    b = np.roll(charge_points(pts, k), m)
    np.testing.assert_array_equal(a, b)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.3, max_value=20.0), st.floats(-10, 10), st.floats(-10, 10))
def test_winding_and_turning_of_circle(r, x, y):
    c = complex(x, y)
    z = circle_points(48, r, c)
    assert winding_number(z, c)[0] == -1
    assert winding_number(z, c + 3 * r)[0] == 0
    assert turning_number(z) == -1
    assert turning_number(z[::-1]) == 1


def test_collocation_from_points_has_no_provenance():
    cs = collocation_from_points(circle_points(8))
    assert cs.spec is None
    with pytest.raises(ValueError):
        cs.arclength_positions
