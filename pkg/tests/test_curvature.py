import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from areasig.curvature import (
    CurvatureEstimate,
    curvature_exit_points,
    curvature_rows_to_csv,
    curvature_small_r,
    exit_point_curvature,
    neville_at_zero,
    radial_partials,
    recover_nu,
    second_partials,
)
from areasig.errors import SingularSystem, VertexPoint
from areasig.geometry import RigidTransform, validate_polygon
from areasig.invariant import TGLFrame
from areasig.shapes import unit_square
from areasig.smooth import Circle, Ellipse, lens_area

RADII = [0.1, 0.05, 0.025]


def test_neville_reproduces_polynomial():
    x = np.array([0.3, 0.2, 0.1, 0.05])
    y = 2.0 - 3.0 * x + 0.5 * x**2 + x**3
    assert neville_at_zero(x, y)[-1, -1] == pytest.approx(2.0, abs=1e-13)


def test_small_r_exact_circles():
    assert curvature_small_r(Circle(1.0), 0.3, RADII).kappa == pytest.approx(1.0, abs=1e-6)
    assert curvature_small_r(Circle(2.0), 0.3, RADII).kappa == pytest.approx(0.5, abs=1e-6)


def test_small_r_dense_polygon_circle():
    # faceting error of the n-gon scales like 1/n^2; 16384 sides keep it under 2e-4
    poly = Circle(1.0).polygon(16384)
    s = 0.5 * (poly.s_vertices[100] + poly.s_vertices[101])
    assert curvature_small_r(poly, s, RADII).kappa == pytest.approx(1.0, abs=1e-3)


def test_small_r_straight_edge():
    sq = validate_polygon([(0, 0), (10, 0), (10, 10), (0, 10)])
    est = curvature_small_r(sq, 5.0, RADII)
    assert est.kappa == pytest.approx(0.0, abs=1e-6)
    assert est.method == "small_r_limit" and est.which_point == "center"


def test_small_r_ellipse_analytic():
    e = Ellipse(2.0, 1.0)
    for s in (0.0, 1.0, 2.5):
        assert curvature_small_r(e, s, RADII).kappa == pytest.approx(e.curvature(s), rel=1e-3)


def test_small_r_rejects_vertex_and_bad_radii():
    with pytest.raises(VertexPoint):
        curvature_small_r(unit_square(), 1.0, RADII)
    with pytest.raises(ValueError):
        curvature_small_r(Circle(1.0), 0.0, [0.1, 0.05])
    with pytest.raises(ValueError):
        curvature_small_r(Circle(1.0), 0.0, [0.05, 0.1, 0.2])


def test_small_r_rigid_invariance():
    e = Ellipse(2.0, 1.0).polygon(2048)
    T = RigidTransform(0.7, (3.0, -5.0))
    moved = validate_polygon(T.apply(e.vertices))
    s = 0.5 * (e.s_vertices[300] + e.s_vertices[301])
    a = curvature_small_r(e, s, RADII).kappa
    b = curvature_small_r(moved, s, RADII).kappa
    # finite differences of g at step 1e-3 r amplify rounding of the area
    assert b == pytest.approx(a, abs=1e-8)


def test_richardson_diagnostic_converges():
    est = curvature_small_r(Ellipse(2.0, 1.0), 0.7, [0.2, 0.1, 0.05, 0.025])
    T = est.diagnostics["table"]
    diffs = np.abs(np.diff(np.diag(T)))
    assert np.all(np.diff(diffs) < 0)


def test_recover_nu_straight_boundary():
    fr = TGLFrame(0.0, 0.3, 0.0, math.pi, 0.3, -0.3)
    nu1, nu2 = recover_nu(math.pi, 0.0, fr)
    assert abs(nu1) < 1e-15 and abs(nu2) < 1e-15


def test_recover_nu_circle():
    R, r = 1.0, 0.5
    c = Circle(R)
    p = radial_partials(c, 0.4, r)
    nu1, nu2 = recover_nu(p["g_rr"], p["g_rs"], p["frame"])
    expected = math.asin(r / (2 * R))
    assert nu1 == pytest.approx(expected, abs=1e-7)
    assert nu2 == pytest.approx(-expected, abs=1e-7)
    # g_rr from the lens area itself: independent second difference
    h = 1e-4
    fd = (lens_area(R, r + h) - 2 * lens_area(R, r) + lens_area(R, r - h)) / h**2
    assert p["g_rr"] == pytest.approx(fd, rel=1e-6)


@given(
    st.floats(-1.2, 1.2),
    st.floats(0.4, 2 * math.pi - 0.4),
    st.floats(-1.3, 1.3),
    st.floats(-1.3, 1.3),
)
def test_recover_nu_round_trip(t1, delta, nu1, nu2):
    t2 = t1 + delta
    if abs(math.cos(t2) - math.cos(t1)) < 1e-3:
        return
    fr = TGLFrame(0.0, 0.4, t1, t2, 0.1, -0.1)
    g_rr, g_rs = second_partials(nu1, nu2, fr)
    a, b = recover_nu(g_rr, g_rs, fr)
    assert a == pytest.approx(nu1, abs=1e-10)
    assert b == pytest.approx(nu2, abs=1e-10)


def test_singular_system():
    fr = TGLFrame(0.0, 0.4, -0.5, 0.5, 0.1, -0.1)
    with pytest.raises(SingularSystem):
        recover_nu(1.0, 0.0, fr)
    fr.nu1 = fr.nu2 = 0.0
    with pytest.raises(SingularSystem):
        exit_point_curvature(0.0, 0.0, fr)


def test_exit_point_straight_boundary():
    fr = TGLFrame(0.0, 0.3, 0.0, math.pi, 0.3, -0.3, nu1=0.0, nu2=0.0)
    k1, k2 = exit_point_curvature(0.0, 0.0, fr)
    assert k1 == 0.0 and k2 == 0.0


@pytest.mark.parametrize("R", [1.0, 2.0])
def test_exit_point_circles(R):
    c = Circle(R)
    for s in (0.0, 1.7):
        kp, km = curvature_exit_points(c, s, 0.5)
        assert kp.kappa == pytest.approx(1 / R, rel=1e-2)
        assert km.kappa == pytest.approx(1 / R, rel=1e-2)
        assert kp.which_point == "s_plus" and km.which_point == "s_minus"


def test_three_methods_agree_on_circle():
    c = Circle(1.0)
    center = curvature_small_r(c, 0.0, RADII).kappa
    kp, km = curvature_exit_points(c, 0.0, 0.5)
    assert kp.kappa == pytest.approx(center, abs=1e-2)
    assert km.kappa == pytest.approx(center, abs=1e-2)


def test_exit_point_ellipse_flat_side():
    e = Ellipse(2.0, 1.0)
    s = e.s_of_t(math.pi / 2)
    kp, km = curvature_exit_points(e, s, 0.3)
    assert kp.kappa == pytest.approx(e.curvature(kp.diagnostics["s_plus"]), rel=1e-2)
    assert km.kappa == pytest.approx(e.curvature(km.diagnostics["s_minus"]), rel=1e-2)


def test_curvature_csv():
    rows = [CurvatureEstimate(0.5, 1.25, "small_r_limit", "center"), (1.0, "small_r_limit", "center", "VertexPoint")]
    text = curvature_rows_to_csv(rows)
    assert text.splitlines() == [
        "s,method,which_point,kappa",
        "0.5,small_r_limit,center,1.25",
        "1,small_r_limit,center,VertexPoint",
    ]
