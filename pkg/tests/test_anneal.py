import math

import numpy as np
import pytest

from knotforge.anneal import AnnealParams, AnnealTrace, anneal, equilateralize, record_metrics, resume
from knotforge.core import Component, Link, contour_length
from knotforge.exceptions import AnnealError, InvariantError
from knotforge.generators import TorusParams, circle, torus_knot
from knotforge.thickness import min_clearance, normalize_to_unit_thickness, thickness

FAST = dict(shrink_step=0.2, checkpoint_every=20, stop_rel_tol=1e-12)


@pytest.fixture(scope="module")
def trefoil():
    return torus_knot(TorusParams.standard(3, 2, n=120))


@pytest.fixture(scope="module")
def trefoil_run(trefoil):
    return anneal(trefoil, AnnealParams(max_iterations=400, **FAST))


def test_circle_converges_to_two_pi():
    trace = anneal(Link((circle(3.0, 128),)), AnnealParams(shrink_step=0.1))
    assert trace.stopped_by == "stop_rule"
    assert trace.records[-1].ropelength == pytest.approx(2 * math.pi, rel=1e-2)


@pytest.mark.parametrize(
    "bad",
    [
        dict(shrink_step=0.0),
        dict(shrink_step=0.6),
        dict(overlap_passes=0),
        dict(checkpoint_every=0),
        dict(stop_window=0),
        dict(stop_rel_tol=0.0),
        dict(ring_count=2),
    ],
)
def test_invalid_params(bad):
    with pytest.raises(InvariantError):
        AnnealParams(**bad)


def test_trace_invariants(trefoil, trefoil_run):
    recs = trefoil_run.records
    its = [r.iteration for r in recs]
    assert its == list(range(0, 401, 20))
    assert recs[-1].ropelength <= recs[0].ropelength
    for a, b in zip(recs, recs[1:]):
        assert b.ropelength <= a.ropelength * 1.001
    for r in recs:
        assert r.thickness == pytest.approx(1.0, rel=1e-2)
        assert r.ropelength >= r.length * (1 - 1e-12) or r.thickness > 1
        assert min(r.point_hull, r.tube_hull, r.cross_section, r.volume_fraction) > 0
    final = trefoil_run.final_link
    assert final.counts == trefoil.counts
    assert min_clearance(final) >= 1.9
    assert thickness(final).thickness == pytest.approx(1.0, rel=1e-9)


def test_first_record_is_the_normalized_input(trefoil, trefoil_run):
    expected = record_metrics(normalize_to_unit_thickness(trefoil), 0)
    assert trefoil_run.records[0].ropelength == pytest.approx(expected.ropelength, rel=1e-12)


@pytest.mark.property
def test_deterministic(trefoil, trefoil_run):
    again = anneal(trefoil, AnnealParams(max_iterations=400, **FAST))
    assert again.records == trefoil_run.records
    np.testing.assert_array_equal(again.final_link.points, trefoil_run.final_link.points)


@pytest.mark.property
def test_split_run_matches_single_run(trefoil, trefoil_run):
    half = anneal(trefoil, AnnealParams(max_iterations=200, **FAST))
    rest = resume(half, max_iterations=200)
    assert rest.records[-1].iteration == 400
    assert rest.records[-1].length == pytest.approx(trefoil_run.records[-1].length, rel=1e-9)
    assert [r.iteration for r in rest.records] == [r.iteration for r in trefoil_run.records]


def test_resume_with_zero_iterations(trefoil_run):
    same = resume(trefoil_run, max_iterations=0)
    assert same.records == trefoil_run.records
    assert same.final_link is trefoil_run.final_link


def test_resume_after_convergence_stops_at_once():
    trace = anneal(Link((circle(3.0, 64),)), AnnealParams(shrink_step=0.1))
    again = resume(trace)
    assert again.stopped_by == "stop_rule"
    assert len(again.records) == len(trace.records)


def test_resume_rejects_vertex_changes(trefoil_run):
    with pytest.raises(InvariantError):
        resume(trefoil_run, n=50)


def test_checkpoint_callback(trefoil):
    seen = []
    trace = anneal(trefoil, AnnealParams(max_iterations=60, **FAST), on_checkpoint=seen.append)
    assert seen == trace.records


def test_equilateralized_run_is_recorded(trefoil):
    trace = anneal(trefoil, AnnealParams(max_iterations=40, equilateralize=True, **FAST), provenance="T(3,2)")
    assert "equilateralized" in trace.provenance
    edges = trace.final_link.components[0].edge_lengths()
    assert edges.max() / edges.min() < 1.05


def test_crossing_input_is_rejected():
    a = Component([(-1, 0, 0), (1, 0, 0), (0, 0.5, 1)])
    b = Component([(0, -1, 0), (0, 1, 0), (0.5, 0, -1)])
    with pytest.raises(AnnealError):
        anneal(Link((a, b)))


def test_equilateralize_identity_and_clusters(t72):
    c = circle(2.0, 100)
    np.testing.assert_allclose(equilateralize(c).vertices, c.vertices, atol=1e-9)
    theta = np.concatenate([np.linspace(0, 0.5, 50, endpoint=False), np.linspace(np.pi, np.pi + 0.5, 50, endpoint=False)])
    clustered = Component(np.column_stack([np.cos(theta), np.sin(theta), np.zeros(100)]))
    out = equilateralize(clustered)
    edges = out.edge_lengths()
    assert edges.max() / edges.min() - 1 < 1e-6
    np.testing.assert_allclose(np.linalg.norm(out.vertices[:, :2], axis=1) <= 1 + 1e-12, True)
    before = contour_length(t72)
    after = contour_length(Link((equilateralize(t72.components[0]),)))
    assert abs(after / before - 1) < 1e-3
