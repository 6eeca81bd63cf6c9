import math

import numpy as np
import pytest
from scipy.optimize import minimize
from hypothesis import given
from hypothesis import strategies as st

from areasig.errors import Degenerate, NotSimple, VertexCountMismatch
from areasig.geometry import (
    RigidTransform,
    circle_crossings,
    disk_polygon_area,
    disk_polygon_areas,
    point_at,
    point_in_polygon,
    points_at,
    read_polygon_json,
    rigid_align,
    validate_polygon,
    write_polygon_json,
)
from areasig.shapes import unit_square

from conftest import monte_carlo_disk_area, random_star_polygon, star_polygons


def test_validate_square_ccw_and_cw():
    sq = validate_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert sq.perimeter == 4.0
    cw = validate_polygon([(0, 0), (0, 1), (1, 1), (1, 0)])
    assert cw.perimeter == 4.0
    assert cw.area > 0


def test_validate_rejects_bowtie_and_degenerate():
    with pytest.raises(NotSimple) as info:
        validate_polygon([(0, 0), (1, 1), (1, 0), (0, 1)])
    assert info.value.edges is not None
    with pytest.raises(Degenerate):
        validate_polygon([(0, 0), (1, 0)])
    with pytest.raises(Degenerate):
        validate_polygon([(0, 0), (1, 0), (2, 0)])
    with pytest.raises(Degenerate):
        validate_polygon([(0, 0), (0, 0), (1, 1)])


def test_point_at_square():
    sq = unit_square()
    p = point_at(sq, 0.5)
    assert np.allclose(p.position, (0.5, 0))
    assert np.allclose(p.tangent_in, (1, 0)) and np.allclose(p.tangent_out, (1, 0))
    c = point_at(sq, 1.0)
    assert np.allclose(c.position, (1, 0))
    assert np.allclose(c.tangent_in, (1, 0)) and np.allclose(c.tangent_out, (0, 1))
    assert c.is_vertex
    w = point_at(sq, 4.5)
    assert np.allclose(w.position, p.position)


def test_points_at_matches_point_at():
    poly = random_star_polygon(np.random.default_rng(3), 9)
    s = np.linspace(0, 2 * poly.perimeter, 57)
    assert np.allclose(points_at(poly, s), [point_at(poly, x).position for x in s])


def test_circle_crossings_square():
    sq = unit_square()
    cr = circle_crossings(sq, (0.5, 0), 0.25)
    # the circle meets the bottom edge at x = 0.25 and x = 0.75
    assert [round(c.s, 12) for c in cr] == [0.25, 0.75]
    assert all(c.transverse for c in cr)
    assert circle_crossings(sq, (0.5, 0), 2.0) == []
    cr = circle_crossings(sq, (0.5, 0), 1.0)
    # two transverse crossings on the sides plus a tangential touch at (0.5, 1)
    assert sum(c.transverse for c in cr) == 2
    touch = [c for c in cr if not c.transverse]
    assert len(touch) == 1 and np.allclose(touch[0].point, (0.5, 1.0))
    for c in cr:
        assert abs(math.hypot(c.point[0] - 0.5, c.point[1]) - 1.0) < 1e-12


def test_circle_crossings_brute_force():
    """Crossings against sign changes of |gamma(s) - c| - r on a fine grid."""
    rng = np.random.default_rng(11)
    for _ in range(20):
        poly = random_star_polygon(rng, 10)
        c = points_at(poly, [rng.uniform(0, poly.perimeter)])[0]
        r = rng.uniform(0.1, 1.0)
        s = np.linspace(0, poly.perimeter, 200001)
        f = np.hypot(*(points_at(poly, s) - c).T) - r
        expected = np.count_nonzero(np.sign(f[1:]) != np.sign(f[:-1]))
        got = [x for x in circle_crossings(poly, c, r) if x.transverse]
        # the center itself is inside the disk; grid sign changes are the crossings
        assert len(got) == expected


def test_disk_area_analytic_cases():
    sq = unit_square()
    r = 0.25
    assert abs(disk_polygon_area(sq, (0.5, 0), r) - math.pi * r * r / 2) < 1e-15
    assert abs(disk_polygon_area(sq, (0, 0), r) - math.pi * r * r / 4) < 1e-15
    assert abs(disk_polygon_area(sq, (0.5, 0.5), r) - math.pi * r * r) < 1e-15
    assert disk_polygon_area(sq, (0.5, 0), 5.0) == pytest.approx(1.0, abs=1e-14)
    assert disk_polygon_area(sq, (3, 3), 1.0) == 0.0


def test_disk_area_chord_segment():
    """Disk centered at (0.5, 0.5 + d) over the top edge: circular segment formula."""
    sq = validate_polygon([(-5, -5), (5, -5), (5, 0.5), (-5, 0.5)])
    r, d = 0.3, 0.1
    seg = r * r * math.acos(d / r) - d * math.sqrt(r * r - d * d)
    assert disk_polygon_area(sq, (0.0, 0.5 + d), r) == pytest.approx(seg, abs=1e-14)


def test_disk_area_monte_carlo_12gon():
    poly = random_star_polygon(np.random.default_rng(5), 12)
    c = points_at(poly, [0.37 * poly.perimeter])[0]
    est, se = monte_carlo_disk_area(poly, c, 0.3, seed=1)
    assert abs(disk_polygon_area(poly, c, 0.3) - est) < 4 * se


def test_vectorised_areas_match():
    poly = random_star_polygon(np.random.default_rng(6), 8)
    centers = points_at(poly, np.linspace(0, poly.perimeter, 31))
    a = disk_polygon_areas(poly, centers, 0.4)
    assert np.allclose(a, [disk_polygon_area(poly, c, 0.4) for c in centers], atol=1e-15)


@given(star_polygons(), st.floats(0.01, 0.99), st.floats(0.05, 1.5))
def test_area_bounds_and_monotone(poly, frac, r):
    c = points_at(poly, [frac * poly.perimeter])[0]
    a1 = disk_polygon_area(poly, c, r)
    a2 = disk_polygon_area(poly, c, 1.1 * r)
    assert 0 <= a1 <= min(math.pi * r * r, poly.area) + 1e-15
    assert a2 >= a1 - 1e-14


@given(star_polygons(), st.floats(0.0, 1.0), st.floats(0.05, 2.0))
def test_transverse_crossings_even(poly, frac, r):
    c = points_at(poly, [frac * poly.perimeter])[0]
    assert sum(x.transverse for x in circle_crossings(poly, c, r)) % 2 == 0


@given(star_polygons())
def test_far_radius_gives_full_area(poly):
    c = points_at(poly, [0.0])[0]
    assert disk_polygon_area(poly, c, 10.0) == pytest.approx(poly.area, rel=1e-12)


@given(star_polygons())
def test_point_at_traverses_length(poly):
    s = np.linspace(0, poly.perimeter, 2001)
    p = points_at(poly, s)
    total = float(np.hypot(*np.diff(p, axis=0).T).sum())
    assert total <= poly.perimeter * (1 + 1e-12)
    assert total > poly.perimeter * (1 - 1e-2)


def test_point_in_polygon_square():
    sq = unit_square()
    assert point_in_polygon(sq, [(0.5, 0.5), (1.5, 0.5), (-0.1, 0.2)]).tolist() == [True, False, False]


def test_rigid_align_examples():
    sq = unit_square()
    t, res = rigid_align(sq, sq)
    assert res == 0.0 and abs(t.angle) < 1e-15
    T = RigidTransform(math.radians(30), (5.0, -2.0))
    moved = T.apply(sq.vertices)
    t, res = rigid_align(sq, moved)
    assert res < 1e-12
    # the square's symmetry leaves the vertex labelling free; the vertex set must match
    mapped = t.apply(sq.vertices)
    assert max(min(np.hypot(*(moved - p).T)) for p in mapped) < 1e-12
    bumped = sq.vertices.copy()
    bumped[2] += (0.01, 0.0)
    _, res = rigid_align(sq, bumped)
    # oracle: direct minimisation over angle and translation with the labels fixed
    def rms(p):
        T = RigidTransform(p[0], (p[1], p[2]))
        return math.sqrt(np.mean(np.sum((T.apply(sq.vertices) - bumped) ** 2, axis=1)))

    best = minimize(rms, [0.0, 0.0, 0.0], method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14})
    assert res == pytest.approx(best.fun, rel=1e-6)
    # below the unaligned RMS 0.01 / sqrt(4)
    assert res < 0.005
    with pytest.raises(VertexCountMismatch):
        rigid_align(sq, random_star_polygon(np.random.default_rng(0), 5))


@given(star_polygons(), st.floats(-math.pi, math.pi), st.floats(-10, 10), st.floats(-10, 10), st.integers(0, 11))
def test_rigid_align_isometry(poly, angle, tx, ty, shift):
    moved = np.roll(RigidTransform(angle, (tx, ty)).apply(poly.vertices), shift % poly.n, axis=0)
    _, res = rigid_align(poly, moved)
    assert res < 1e-12 * max(1.0, abs(tx), abs(ty))


def test_polygon_json_round_trip(tmp_path):
    poly = random_star_polygon(np.random.default_rng(2), 7)
    path = tmp_path / "p.json"
    write_polygon_json(path, poly)
    back = read_polygon_json(path)
    assert np.array_equal(back.vertices, poly.vertices)
    path.write_text('{"vertices": [[0, 0], [1e0, 0], [1, 1.5E-1]]}\n')
    assert read_polygon_json(path).n == 3
