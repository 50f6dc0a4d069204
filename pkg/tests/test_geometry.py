from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lipschitz_trace.geometry import (AngleSpectrum, Polygon, PolygonError, boundary_segments,
                                      contains, distance_to_boundary, interior_angles, l_shape,
                                      lambda_profile, make_sawtooth, parse_domain,
                                      polygon_from_json, polygon_to_json, rectangle,
                                      sector_polygon, shoelace_area, square, triangulate)


def star_polygon(radii):
    """Star-shaped polygon around the origin; simple for any positive radii."""
    n = len(radii)
    th = 2 * np.pi * np.arange(n) / n
    return np.column_stack([radii * np.cos(th), radii * np.sin(th)])


radii_st = st.lists(st.floats(0.3, 1.0), min_size=3, max_size=12).map(np.array)


# -- tent profile ----------------------------------------------------------------
@pytest.mark.parametrize("x, expected", [(0.5, 0.5), (1.5, 0.5), (3.5, 0.5), (0.0, 0.0), (1.0, 1.0)])
def test_lambda_profile_values(x, expected):
    assert lambda_profile(x) == pytest.approx(expected, abs=1e-15)


@given(st.floats(-50, 50))
def test_lambda_profile_is_even_and_periodic(x):
    assert lambda_profile(x + 2.0) == pytest.approx(lambda_profile(x), abs=1e-12)
    assert lambda_profile(-x) == pytest.approx(lambda_profile(x), abs=1e-12)
    assert 0.0 <= lambda_profile(x) <= 1.0


# -- polygons ---------------------------------------------------------------------
def test_square_and_l_shape_angles():
    sq = interior_angles(square(1.0))
    assert sq.omegas == pytest.approx([math.pi / 2] * 4)
    assert sq.alphas == pytest.approx([2.0] * 4)
    L = interior_angles(l_shape())
    assert L.omegas == pytest.approx([math.pi / 2] * 5 + [3 * math.pi / 2])
    assert L.reflex_count == 1 and not L.is_convex


def test_sawtooth_k1_angles():
    d = make_sawtooth(1)
    ang = dict(zip(map(tuple, d.vertices.tolist()), d.polygon.angles))
    assert ang[(0.0, 0.0)] == pytest.approx(math.pi / 4)
    assert ang[(0.5, 0.0)] == pytest.approx(math.pi / 4)
    # the tip, seen from inside the domain above the teeth, is reflex
    assert ang[(0.25, 0.25)] == pytest.approx(3 * math.pi / 2)
    assert ang[(0.0, 0.5)] == pytest.approx(math.pi / 2)


@pytest.mark.parametrize("q, d", [((0.25, 0.25), 0.25), ((0.125, 0.25), 0.125), ((1.0, 1.0), 0.0)])
def test_square_distance(q, d):
    assert distance_to_boundary(square(), q) == pytest.approx(d, abs=1e-15)


def test_l_shape_distance_near_reentrant_corner():
    L = l_shape()
    q = np.array([0.45, 0.47])
    # brute force: dense sampling of the boundary
    pts = np.concatenate([s.point_at(np.linspace(0, s.length, 20001)) for s in L.segments])
    brute = np.min(np.hypot(*(pts - q).T))
    assert distance_to_boundary(L, q) == pytest.approx(brute, abs=1e-5)
    assert distance_to_boundary(L, q) == pytest.approx(math.hypot(0.05, 0.03), rel=1e-12)


def test_contains():
    assert contains(square(), (0.25, 0.25))
    assert not contains(square(), (1.0, 1.0))
    assert not contains(l_shape(), (0.75, 0.75))
    assert not contains(square(), (0.0, 0.25))


def test_triangulations_cover_the_area():
    assert len(triangulate(square())) == 2
    assert len(triangulate(l_shape())) == 4
    for p in (square(), l_shape(), make_sawtooth(1)):
        t = triangulate(p)
        area = sum(abs(shoelace_area(tri)) for tri in t)
        assert area == pytest.approx(p.polygon.area, rel=1e-13)
    assert make_sawtooth(1).area == pytest.approx(0.25 - 1 / 16, abs=1e-15)


def test_segments_frames():
    bottom = boundary_segments(square())[0]
    assert bottom.tangent == pytest.approx([1.0, 0.0])
    assert bottom.normal == pytest.approx([0.0, -1.0])
    rise = make_sawtooth(1).gamma_eps[0]
    assert rise.tangent == pytest.approx([1 / math.sqrt(2), 1 / math.sqrt(2)])


def test_sawtooth_structure():
    d = make_sawtooth(2)
    assert len(d.gamma_eps) == 4
    assert [s.length for s in d.gamma_eps] == pytest.approx([math.sqrt(2) / 8] * 4, rel=1e-15)
    with pytest.raises(ValueError):
        make_sawtooth(0)
    with pytest.raises(ValueError):
        make_sawtooth(1.5)


@pytest.mark.parametrize("k", [1, 2, 3, 8, 64, 4096])
def test_sawtooth_area(k):
    assert make_sawtooth(k).area == pytest.approx(0.25 - 1 / (16 * k), abs=1e-12)


def test_sawtooth_distance_matches_polygon_distance():
    d = make_sawtooth(4)
    rng = np.random.default_rng(3)
    q = rng.uniform(0, 0.5, (4000, 2))
    assert np.allclose(d.distance(q), d.polygon.distance(q), atol=1e-15)


def test_invalid_polygons():
    with pytest.raises(PolygonError, match="at least 3"):
        Polygon([[0, 0], [1, 0]])
    with pytest.raises(PolygonError, match="counter-clockwise"):
        Polygon([[0, 0], [0, 1], [1, 0]])
    with pytest.raises(PolygonError, match="collinear"):
        Polygon([[0, 0], [1, 0], [2, 0], [1, 1]])
    with pytest.raises(PolygonError, match="intersect"):
        Polygon([[0, 0], [4, 0], [4, 4], [2, -1], [0, 4]])
    with pytest.raises(PolygonError, match="repeated"):
        Polygon([[0, 0], [1, 0], [1, 0], [0, 1]])
    with pytest.raises(ValueError):
        AngleSpectrum.from_angles([])


def test_json_round_trip_and_domain_specs(tmp_path):
    p = l_shape(2.0)
    q = polygon_from_json(polygon_to_json(p))
    assert np.array_equal(p.vertices, q.vertices)
    f = tmp_path / "poly.json"
    f.write_text(json.dumps({"vertices": [[0, 0], [1, 0], [0, 1]]}))
    assert parse_domain(f"file:{f}").area == pytest.approx(0.5)
    assert parse_domain("rect:a=1,b=1/2").area == pytest.approx(0.5)
    assert parse_domain("sawtooth:k=2").k == 2
    assert parse_domain("sector:alpha=2/3,n=8").corner_flags[0]
    with pytest.raises(PolygonError):
        polygon_from_json("[1, 2]")
    with pytest.raises(ValueError):
        parse_domain("circle")


def test_sector_polygon_opening():
    p = sector_polygon(2 / 3, n=32)
    assert p.angles[0] == pytest.approx(1.5 * math.pi)


# -- properties -------------------------------------------------------------------
@given(radii_st)
def test_star_polygon_angle_sum(radii):
    p = Polygon(star_polygon(radii))
    assert math.fsum(p.angles) == pytest.approx((len(p) - 2) * math.pi, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(radii_st)
def test_triangulation_area_equals_shoelace(radii):
    p = Polygon(star_polygon(radii))
    t = triangulate(p)
    assert len(t) == len(p) - 2
    assert math.fsum(abs(shoelace_area(tri)) for tri in t) == pytest.approx(p.area, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(radii_st, st.integers(0, 2 ** 32 - 1))
def test_distance_is_one_lipschitz_and_zero_outside(radii, seed):
    p = Polygon(star_polygon(radii))
    rng = np.random.default_rng(seed)
    a, b = rng.uniform(-1.1, 1.1, (2, 200, 2))
    da, db = p.distance(a), p.distance(b)
    assert np.all(np.abs(da - db) <= np.hypot(*(a - b).T) + 1e-12)
    assert np.all(da[~p.contains(a)] == 0.0)
    assert np.all(da[p.contains(a)] > 0.0)


@given(st.floats(0.1, 10), st.floats(0.1, 10))
def test_rectangle_centroid_and_bounds(a, b):
    r = rectangle(a, b)
    assert r.centroid == pytest.approx([a / 2, b / 2])
    assert r.bounds == (0.0, 0.0, a, b)
    assert r.perimeter == pytest.approx(2 * (a + b))
