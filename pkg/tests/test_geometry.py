import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seaplan.geometry import (
    Disc,
    HalfPlane,
    Polygon,
    Vec2,
    half_plane_contains,
    is_convex,
    is_simple,
    polygon_area,
    polygon_contains,
    polygon_contains_many,
    rotate,
    segments_intersect,
    signed_area,
)

finite = st.floats(min_value=-1e4, max_value=1e4, allow_nan=False)
angles = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)

UNIT_SQUARE = Polygon.from_pairs([(0, 0), (1, 0), (1, 1), (0, 1)])
L_SHAPE = Polygon.from_pairs([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])


def close(a: Vec2, b: Vec2, tol=1e-9):
    return (a - b).norm() <= tol


def test_rotate_quarter_turn_goes_north_to_east():
    assert close(rotate(Vec2(1, 0), math.pi / 2), Vec2(0, 1))


def test_rotate_identity():
    assert rotate(Vec2(3, 4), 0.0) == Vec2(3, 4)


def test_rotate_thirty_degrees():
    r = rotate(Vec2(1, 0), math.pi / 6)
    assert r.n == pytest.approx(0.8660254, abs=1e-6)
    assert r.e == pytest.approx(0.5, abs=1e-12)


@given(finite, finite, angles)
def test_rotate_preserves_norm(n, e, theta):
    v = Vec2(n, e)
    assert rotate(v, theta).norm() == pytest.approx(v.norm(), rel=1e-9, abs=1e-9)


@given(finite, finite, angles, angles)
def test_rotate_composes(n, e, a, b):
    v = Vec2(n, e)
    lhs = rotate(rotate(v, a), b)
    rhs = rotate(v, a + b)
    assert close(lhs, rhs, 1e-9 * max(1.0, v.norm()) * 10)


def test_half_plane_examples():
    h = HalfPlane(Vec2(0, 1), Vec2(0, 2))
    assert half_plane_contains(h, Vec2(10, 3))
    assert half_plane_contains(h, Vec2(10, 2))
    assert not half_plane_contains(h, Vec2(10, 1.9))


def test_half_plane_rejects_non_unit_normal():
    with pytest.raises(ValueError):
        HalfPlane(Vec2(0, 2), Vec2(0, 0))


@given(angles, finite, finite, finite, finite)
def test_reflection_across_boundary_flips_membership(theta, an, ae, pn, pe):
    normal = Vec2(math.cos(theta), math.sin(theta))
    h = HalfPlane(normal, Vec2(an, ae))
    p = Vec2(pn, pe)
    m = h.margin(p)
    reflected = p - normal * (2 * m)
    if abs(m) > 1e-6:
        assert half_plane_contains(h, p) != half_plane_contains(h, reflected)


def test_polygon_contains_examples():
    assert polygon_contains(UNIT_SQUARE, Vec2(0.5, 0.5))
    assert not polygon_contains(UNIT_SQUARE, Vec2(2, 0))
    assert not polygon_contains(L_SHAPE, Vec2(1.5, 1.5))


def test_polygon_boundary_counts_as_inside():
    assert polygon_contains(UNIT_SQUARE, Vec2(1.0, 0.5))
    assert polygon_contains(UNIT_SQUARE, Vec2(0.0, 0.0))
    assert polygon_contains(L_SHAPE, Vec2(1.5, 1.0))


def test_vectorized_contains_matches_scalar():
    rng = np.random.default_rng(3)
    pts = rng.uniform(-0.5, 2.5, size=(2000, 2))
    pts[:10] = [[0, 0], [2, 0], [1, 1], [1.5, 1], [1, 1.5], [0, 1], [2, 0.5], [0.5, 2], [1, 2], [3, 3]]
    many = polygon_contains_many(L_SHAPE, pts)
    single = [polygon_contains(L_SHAPE, Vec2(*p)) for p in pts]
    assert many.tolist() == single


def test_polygon_area_examples():
    assert polygon_area(UNIT_SQUARE) == 1.0
    assert polygon_area(Polygon.from_pairs([(0, 0), (4, 0), (0, 3)])) == 6.0
    assert polygon_area(L_SHAPE) == 3.0


def test_signed_area_orientation():
    cw = Polygon(tuple(reversed(UNIT_SQUARE.vertices)))
    assert signed_area(UNIT_SQUARE) == -signed_area(cw)


def test_area_matches_monte_carlo():
    rng = np.random.default_rng(11)
    ang = np.sort(rng.uniform(0, 2 * np.pi, 12))
    rad = rng.uniform(0.5, 1.5, 12)
    poly = Polygon.from_pairs(np.column_stack([rad * np.cos(ang), rad * np.sin(ang)]))
    lo_n, lo_e, hi_n, hi_e = poly.bbox()
    pts = np.column_stack([rng.uniform(lo_n, hi_n, 10**6), rng.uniform(lo_e, hi_e, 10**6)])
    est = polygon_contains_many(poly, pts).mean() * (hi_n - lo_n) * (hi_e - lo_e)
    assert est == pytest.approx(polygon_area(poly), rel=0.02)


def test_polygon_validation():
    with pytest.raises(ValueError):
        Polygon.from_pairs([(0, 0), (1, 0)])
    with pytest.raises(ValueError):
        Polygon.from_pairs([(0, 0), (1, 0), (1, 1), (0, 0)])
    with pytest.raises(ValueError):
        Polygon.from_pairs([(0, 0), (1, 0), (2, 0)])


def test_simplicity_and_convexity():
    bowtie = Polygon.from_pairs([(0, 0), (2, 2), (2, 0), (0, 1)])
    assert not is_simple(bowtie)
    assert is_simple(L_SHAPE)
    assert is_convex(UNIT_SQUARE)
    assert not is_convex(L_SHAPE)


def test_segments_intersect_touching_endpoint():
    assert segments_intersect(Vec2(0, 0), Vec2(1, 0), Vec2(1, 0), Vec2(2, 1))
    assert not segments_intersect(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), Vec2(1, 1))


def test_disc_requires_positive_radius():
    with pytest.raises(ValueError):
        Disc(Vec2(0, 0), 0.0)


def test_heading_convention():
    v = Vec2.from_heading(180.0, 10.0)
    assert v.n == pytest.approx(-10.0)
    assert v.e == pytest.approx(0.0, abs=1e-12)
    assert Vec2.from_heading(90.0, 1.0).e == pytest.approx(1.0)
