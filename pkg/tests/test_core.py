import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from knotforge.core import Component, Link, centroid, contour_length, rescale, tangents
from knotforge.exceptions import InvariantError
from knotforge.thickness import thickness

from conftest import ngon, random_rotation


def test_ngon_perimeter():
    assert contour_length(ngon(400, 5.0)) == pytest.approx(2 * 400 * 5 * math.sin(math.pi / 400), rel=1e-12)


def test_length_is_additive():
    c = ngon(400, 5.0).components[0]
    far = Component(c.vertices + 100.0)
    assert contour_length(Link((c, far))) == pytest.approx(2 * contour_length(Link((c,))), rel=1e-14)


def test_torus_length_matches_high_precision_sum(t72):
    mpmath.mp.dps = 40
    v = t72.points
    total = mpmath.mpf(0)
    for a, b in zip(v, np.roll(v, -1, axis=0)):
        total += mpmath.sqrt(sum((mpmath.mpf(float(x)) - mpmath.mpf(float(y))) ** 2 for x, y in zip(a, b)))
    assert contour_length(t72) == pytest.approx(float(total), rel=1e-12)


def test_centroid(square, t72, rng):
    np.testing.assert_allclose(centroid(square), 0.0, atol=1e-15)
    shift = rng.standard_normal(3)
    moved = Component(square.vertices + shift)
    np.testing.assert_allclose(centroid(moved), shift, atol=1e-14)
    np.testing.assert_allclose(centroid(t72.components[0]), 0.0, atol=1e-12)


def test_tangents_of_square(square):
    expected = [(-1, 0, 0), (0, -1, 0), (1, 0, 0), (0, 1, 0)]
    np.testing.assert_allclose(tangents(square), expected, atol=1e-15)
    np.testing.assert_allclose(tangents(Component(square.vertices * 3.7)), expected, atol=1e-15)


def test_ngon_tangents_perpendicular_to_bisector():
    n = 64
    comp = ngon(n, 2.0).components[0]
    t = tangents(comp)
    mid = 0.5 * (comp.vertices + np.roll(comp.vertices, -1, axis=0))
    radial = mid / np.linalg.norm(mid, axis=1)[:, None]
    np.testing.assert_allclose(np.einsum("ij,ij->i", t, radial), 0.0, atol=1e-12)
    # the vertex radial direction is off by exactly half an edge angle
    vr = comp.vertices / np.linalg.norm(comp.vertices, axis=1)[:, None]
    assert np.all(np.abs(np.einsum("ij,ij->i", t, vr)) <= math.sin(math.pi / n) + 1e-12)


@pytest.mark.property
@pytest.mark.parametrize("c", [0.5, 2.0, 10.0])
def test_rescale_scales_length_and_thickness(t72, c):
    scaled = rescale(t72, c)
    assert contour_length(scaled) == pytest.approx(c * contour_length(t72), rel=1e-12)
    assert thickness(scaled).thickness == pytest.approx(c * thickness(t72).thickness, rel=1e-12)


def test_rescale_identity_and_square(square):
    link = Link((square,))
    np.testing.assert_array_equal(rescale(link, 1).points, link.points)
    assert contour_length(rescale(link, 2)) == pytest.approx(2 * contour_length(link))


@pytest.mark.parametrize("bad", [0, -1.0, float("inf"), float("nan")])
def test_rescale_rejects_bad_factor(square, bad):
    with pytest.raises(InvariantError):
        rescale(Link((square,)), bad)


@pytest.mark.property
def test_rigid_motion_invariance(t72, rng):
    rot = random_rotation(rng)
    moved = t72.with_points(t72.points @ rot.T + rng.standard_normal(3) * 10)
    assert contour_length(moved) == pytest.approx(contour_length(t72), rel=1e-10)


def test_closure_and_unit_tangents(t72):
    comp = t72.components[0]
    t = tangents(comp)
    np.testing.assert_allclose(np.linalg.norm(t, axis=1), 1.0, atol=1e-12)
    closure = (comp.edge_lengths()[:, None] * t).sum(axis=0)
    np.testing.assert_allclose(closure, 0.0, atol=1e-9)


@pytest.mark.parametrize(
    "verts",
    [
        [(0, 0, 0), (1, 0, 0)],
        [(0, 0, 0), (1, 0, 0), (1, 0, 0)],
        [(0, 0, 0), (1, 0, 0), (0, np.nan, 0)],
        [(0, 0), (1, 0), (0, 1)],
    ],
)
def test_component_invariants(verts):
    with pytest.raises(InvariantError):
        Component(verts)


def test_link_needs_a_component():
    with pytest.raises(InvariantError):
        Link(())


def test_vertices_are_read_only(square):
    with pytest.raises(ValueError):
        square.vertices[0, 0] = 5.0
