import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from areasig.errors import NotTCGLSource
from areasig.geometry import point_at, points_at, validate_polygon
from areasig.graphlike import (
    _arc_pair,
    _tcgl_sample,
    check_tcgl,
    check_tgl_curve,
    check_two_arc,
    fits_open_half_plane,
    graph_orientation,
    is_graph_like,
    is_tangentially_graph_like,
    largest_passing_radius,
    max_deviation,
    tcgl_polygon_approximation,
)
from areasig.shapes import regular_ngon, rounded_rectangle, unit_square
from areasig.smooth import Circle, Ellipse, Star

from conftest import star_polygons


def test_square_passes_at_quarter_and_fails_past_half():
    sq = unit_square()
    assert check_tcgl(sq, 0.25, 512).passed
    assert check_tcgl(sq, 0.5, 512).passed
    rep = check_tcgl(sq, 0.51, 512)
    assert not rep.passed
    assert rep.first_failure is not None
    # the mid-edge disk holds both corners of its own side
    mid = _tcgl_sample(sq, 0.5, 0.51)
    assert mid.crossing_count == 2 and not mid.tcgl_ok


def test_square_largest_radius():
    assert largest_passing_radius(unit_square(), n_samples=64) == pytest.approx(0.5, abs=1e-5)


def test_report_json_shape():
    rep = check_tcgl(unit_square(), 0.51, 16)
    data = json.loads(rep.to_json())
    assert set(data) == {"radius", "pass", "failures"}
    assert data["pass"] is False
    assert all(set(f) == {"s", "crossing_count", "margin"} for f in data["failures"])
    assert len(data["failures"]) == len(rep.failures)
    big = json.loads(check_tcgl(unit_square(), 5.0, 4).to_json())
    assert big["failures"][0]["crossing_count"] == 0
    assert big["failures"][0]["margin"] is None


def _brute_margin(poly, s, r, n=20001):
    """Minimum generator component of the in-disk arc, from dense sampling."""
    bp, count, s_minus, s_plus = _arc_pair(poly, s, r)
    L = poly.perimeter
    span = (s_plus - s_minus) % L
    pts = points_at(poly, s_minus + span * np.linspace(0, 1, n))
    d = np.diff(pts, axis=0)
    d = d / np.hypot(d[:, 0], d[:, 1])[:, None]
    return min((d @ bp.tangent_in).min(), (d @ bp.tangent_out).min())


def test_margin_matches_dense_sampling():
    rng = np.random.default_rng(4)
    polys = [unit_square(), regular_ngon(7)]
    for poly in polys:
        r = 0.3 * poly.edge_lengths.min()
        for s in np.concatenate([poly.s_vertices, rng.uniform(0, poly.perimeter, 10)]):
            rec = _tcgl_sample(poly, s, r)
            if rec.two_arc:
                assert rec.worst_margin == pytest.approx(_brute_margin(poly, s, r), abs=1e-9)


def test_generator_sufficiency():
    """Positive projection on both generators extends to every cone element."""
    rng = np.random.default_rng(5)
    poly = regular_ngon(6)
    r = 0.4
    for s in np.linspace(0, poly.perimeter, 40, endpoint=False):
        rec = _tcgl_sample(poly, s, r)
        assert rec.tcgl_ok
        bp, _, s_minus, s_plus = _arc_pair(poly, s, r)
        span = (s_plus - s_minus) % poly.perimeter
        pts = points_at(poly, s_minus + span * np.linspace(0, 1, 2001))
        for _ in range(10):
            a, b = rng.random(2)
            w = a * bp.tangent_in + b * bp.tangent_out
            proj = pts @ w
            assert np.all(np.diff(proj) >= -1e-12)


def test_two_arc_checks():
    sq = unit_square()
    assert check_two_arc(sq, 0.25, 256).passed
    assert not check_two_arc(sq, 2 * sq.diameter, 64).passed
    star = Star(1.0, 0.25, 4).polygon(512)
    rep = check_two_arc(star, 1.5, 256)
    assert not rep.passed
    assert all(f.crossing_count != 2 for f in rep.failures)


def test_star_fails_at_necks():
    star = Star(1.0, 0.25, 4)
    rep = check_tgl_curve(star, 1.0, 128)
    assert not rep.passed
    # lobe tips (t = 0, pi/2, ...) pass; samples next to the necks fail
    tip = [rec for rec in rep.samples if abs(rec.s) < 1e-12][0]
    assert tip.tcgl_ok
    neck_s = star.s_of_t(math.pi / 4)
    near = min(rep.samples, key=lambda rec: abs(rec.s - neck_s))
    assert not near.tcgl_ok


@given(star_polygons(3, 9), st.floats(0.02, 0.8))
def test_tcgl_implies_two_arc(poly, r):
    rep = check_tcgl(poly, r, 64)
    if rep.passed:
        assert all(rec.crossing_count == 2 for rec in rep.samples)
        assert check_two_arc(poly, r, 64).passed


@pytest.mark.parametrize(
    "curve, radii", [(Circle(1.0), [0.9, 0.6, 0.3]), (Ellipse(2.0, 1.0), [0.45, 0.3, 0.15])], ids=["circle", "ellipse"]
)
def test_tgl_monotone_in_radius(curve, radii):
    verdicts = [check_tgl_curve(curve, r, 128).passed for r in radii]
    assert verdicts[0]
    assert all(verdicts)
    margins = [min(rec.worst_margin for rec in check_tgl_curve(curve, r, 64).samples) for r in radii]
    assert margins == sorted(margins)


def test_long_rounded_rectangle_graph_like_but_not_tgl():
    rr = rounded_rectangle(8.0, 2.0, 0.5, 512)
    assert np.allclose(rr.vertices[0], (0.0, 0.0))
    assert not is_tangentially_graph_like(rr, 0.0, 3.0)
    phi = graph_orientation(rr, (0.0, 0.0), 3.0)
    assert phi is not None
    assert abs(math.tan(phi)) > 2.6
    assert is_graph_like(rr, (0.0, 0.0), 3.0)


def test_graph_like_basics():
    sq = unit_square()
    assert is_tangentially_graph_like(sq, 0.5, 0.25)
    assert is_graph_like(sq, (0.5, 0.0), 0.25)
    # disk at the bottom middle of width 1 with r = 0.6 holds both lower corners
    assert not is_tangentially_graph_like(sq, 0.5, 0.6)
    assert not is_graph_like(sq, (0.5, 0.0), 0.6)


def test_fits_open_half_plane():
    assert fits_open_half_plane(np.array([[1, 0], [0, 1]]))
    assert not fits_open_half_plane(np.array([[1, 0], [-1, 0]]))
    assert not fits_open_half_plane(np.array([[1, 0], [0, 1], [-1, 0]]))


def test_approximation_unit_circle():
    circle = Circle(1.0)
    eps = 0.1
    poly = tcgl_polygon_approximation(circle, 0.5, eps)
    assert poly.n >= math.ceil(2 * math.pi / (eps / 3))
    assert poly.n == 189
    assert poly.edge_lengths.max() <= eps / 3
    src = np.array([circle.point(s) for s in np.linspace(0, circle.perimeter, 5000)])
    assert max_deviation(src, poly) <= eps / 6
    assert check_tcgl(poly, 0.5 - eps, 512).passed


@pytest.mark.slow
def test_approximation_finer_epsilon():
    circle = Circle(1.0)
    coarse = tcgl_polygon_approximation(circle, 0.5, 0.1)
    fine = tcgl_polygon_approximation(circle, 0.5, 0.01)
    assert fine.n == pytest.approx(10 * coarse.n, rel=0.01)
    assert check_tcgl(fine, 0.49, 256).passed


def test_approximation_rejects_non_tcgl_source():
    with pytest.raises(NotTCGLSource):
        tcgl_polygon_approximation(Star(1.0, 0.25, 4), 1.0, 0.1)
    with pytest.raises(NotTCGLSource):
        tcgl_polygon_approximation(unit_square(), 0.6, 0.1)
    with pytest.raises(ValueError):
        tcgl_polygon_approximation(Circle(1.0), 0.5, 0.6)


def test_max_deviation():
    sq = unit_square()
    assert max_deviation([(0.5, 0.5)], sq) == pytest.approx(0.5)
    assert max_deviation([(2.0, 0.5)], sq) == pytest.approx(1.0)
    assert max_deviation(sq.vertices, sq) == 0.0
