"""Shrink-on-no-overlap tightening of links at unit tube radius.

Each iteration pulls every vertex toward the midpoint of its neighbours
(shrinking the curve) and then pushes apart vertex pairs that sit closer
than one tube diameter. Only pairs whose separation along the curve is at
least ``exclusion_arc`` (default pi) are tested: on a curve whose radius
of curvature is below 1 such pairs come closer than 2, so the same test
also bounds curvature. At checkpoints the link is rescaled to unit
thickness and its metrics are recorded.
"""

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial import cKDTree

from .core import Component, Link, contour_length
from .exceptions import AnnealError, DegenerateHullError, InvariantError
from .hull import point_hull_volume, tube_hull_volume
from .metrics import cross_section_estimate
from .thickness import thickness
from .validation import check_count, check_positive

log = logging.getLogger(__name__)

DIAMETER = 2.0


@dataclass(frozen=True)
class AnnealParams:
    """Knobs of the shrink/repair loop.

    ``stop_window`` counts checkpoints; every other count is in iterations.
    """

    shrink_step: float = 0.01
    overlap_passes: int = 10
    checkpoint_every: int = 50
    stop_window: int = 20
    stop_rel_tol: float = 1e-6
    max_iterations: int = 200_000
    equilateralize: bool = False
    ring_count: int = 20
    exclusion_arc: float = math.pi
    neighbor_skin: float = 0.5

    def __post_init__(self):
        step = check_positive(self.shrink_step, "shrink_step")
        if step > 0.5:
            raise InvariantError(f"shrink_step must lie in (0, 0.5], got {step}")
        check_count(self.overlap_passes, "overlap_passes")
        check_count(self.checkpoint_every, "checkpoint_every")
        check_count(self.stop_window, "stop_window")
        check_count(self.max_iterations, "max_iterations", minimum=0)
        check_count(self.ring_count, "ring_count", minimum=3)
        check_positive(self.stop_rel_tol, "stop_rel_tol")
        check_positive(self.exclusion_arc, "exclusion_arc")
        check_positive(self.neighbor_skin, "neighbor_skin")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    length: float
    thickness: float
    ropelength: float
    point_hull: float
    tube_hull: float
    cross_section: float
    volume_fraction: float
    degenerate_hull: bool = False


@dataclass
class AnnealTrace:
    records: list
    final_link: Link
    params: AnnealParams
    provenance: str = ""
    stopped_by: str = ""

    @property
    def iterations(self):
        return self.records[-1].iteration if self.records else 0

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records])


def equilateralize(component, tol=1e-12, max_rounds=200):
    """Redistribute vertices along the polygon so all edges have equal length.

    New vertices lie on the input polygon; vertex 0 stays fixed and the count
    is unchanged. Arc-length spacing is rescaled until the chord lengths
    agree to ``tol`` relative.
    """
    verts = component.vertices
    closed = np.vstack([verts, verts[:1]])
    arc = np.concatenate([[0.0], np.cumsum(component.edge_lengths())])
    total = arc[-1]
    gaps = np.full(component.n, total / component.n)
    for _ in range(max_rounds):
        s = np.concatenate([[0.0], np.cumsum(gaps[:-1])])
        out = np.column_stack([np.interp(s, arc, closed[:, k]) for k in range(3)])
        chords = np.linalg.norm(np.roll(out, -1, axis=0) - out, axis=1)
        if np.ptp(chords) <= tol * chords.mean():
            break
        # chords shorter than average cut across corners: give them more arc
        gaps *= chords.mean() / chords
        gaps *= total / gaps.sum()
    return Component(out)


def record_metrics(link, iteration, ring_count=20):
    """Metrics of a link already at unit thickness."""
    report = thickness(link)
    length = contour_length(link)
    degenerate = False
    try:
        point = point_hull_volume(link)
        tube = tube_hull_volume(link, ring_count)
    except DegenerateHullError:
        point, tube, degenerate = 0.0, 0.0, True
    return TraceRecord(
        iteration=iteration,
        length=length,
        thickness=report.thickness,
        ropelength=length / report.thickness,
        point_hull=point,
        tube_hull=tube,
        cross_section=cross_section_estimate(link),
        volume_fraction=math.pi * length / tube if tube > 0 else 0.0,
        degenerate_hull=degenerate,
    )


class _State:
    """Flat vertex array plus the topology and neighbour lists of the loop."""

    def __init__(self, link, params):
        self.link = link
        self.params = params
        self.x = link.points.copy()
        counts = np.asarray(link.counts)
        self.counts = counts
        self.comp = np.repeat(np.arange(len(counts)), counts)
        self.offset = np.concatenate([[0], np.cumsum(counts)[:-1]])
        local = np.arange(len(self.x)) - self.offset[self.comp]
        size = counts[self.comp]
        self.prev = self.offset[self.comp] + (local - 1) % size
        self.next = self.offset[self.comp] + (local + 1) % size
        self.rebuild()

    def rebuild(self):
        """Verlet list: eligible pairs within diameter + skin."""
        x = self.x
        edge = np.linalg.norm(x[self.next] - x, axis=1)
        reach = DIAMETER + edge.max() + self.params.neighbor_skin
        pairs = cKDTree(x).query_pairs(reach, output_type="ndarray")
        i, j = pairs[:, 0], pairs[:, 1]
        arc = np.empty(len(x))
        total = np.empty(len(self.counts))
        for k, (start, n) in enumerate(zip(self.offset, self.counts)):
            seg = edge[start:start + n]
            arc[start:start + n] = np.concatenate([[0.0], np.cumsum(seg[:-1])])
            total[k] = seg.sum()
        same = self.comp[i] == self.comp[j]
        sep = np.abs(arc[i] - arc[j])
        sep = np.minimum(sep, total[self.comp[i]] - sep)
        keep = ~same | (sep >= self.params.exclusion_arc)
        order = np.lexsort((j[keep], i[keep]))
        self.pi, self.pj = i[keep][order], j[keep][order]
        self.xref = x.copy()
        # vertices of two strands crossing at distance D straddle the closest
        # approach by up to h/2 each, so hold vertices at sqrt(D^2 + h^2/2)
        self.target = math.sqrt(DIAMETER**2 + 0.5 * edge.max() ** 2)

    def shrink(self, step):
        x = self.x
        x += step * (0.5 * (x[self.prev] + x[self.next]) - x)

    def repair(self, passes):
        """Push overlapping pairs apart; returns the smallest remaining distance."""
        x, n = self.x, len(self.x)
        closest = np.inf
        for _ in range(passes):
            diff = x[self.pi] - x[self.pj]
            dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
            hit = dist < self.target
            if not hit.any():
                return dist.min() if dist.size else np.inf
            i, j, diff, dist = self.pi[hit], self.pj[hit], diff[hit], dist[hit]
            push = ((self.target - dist) / (2.0 * dist))[:, None] * diff
            # each vertex moves by the mean of its pushes, so crowded vertices do not overshoot
            idx = np.concatenate([i, j])
            hits = np.bincount(idx, minlength=n).astype(np.float64)
            both = np.concatenate([push, -push])
            move = np.column_stack([np.bincount(idx, both[:, k], minlength=n) for k in range(3)])
            x += move / np.maximum(hits, 1.0)[:, None]
            closest = dist.min()
        diff = x[self.pi] - x[self.pj]
        dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        return dist.min() if dist.size else closest

    def moved_far(self):
        d = self.x - self.xref
        return np.einsum("ij,ij->i", d, d).max() > (0.5 * self.params.neighbor_skin) ** 2

    def as_link(self):
        return self.link.with_points(self.x)

    def equilateralize(self):
        link = self.as_link()
        self.x = Link(tuple(equilateralize(c) for c in link.components), name=link.name).points

    def normalize(self):
        report = thickness(self.as_link())
        if report.degenerate:
            raise AnnealError("link reached zero thickness during annealing")
        self.x *= 1.0 / report.thickness


def _stalled(records, params):
    w = params.stop_window
    if len(records) <= w:
        return False
    old, new = records[-1 - w].ropelength, records[-1].ropelength
    return (old - new) / old < params.stop_rel_tol


def _run(link, params, records, provenance, on_checkpoint, normalize_first):
    state = _State(link, params)
    if normalize_first:
        state.normalize()
        state.rebuild()
    start = records[-1].iteration if records else 0
    if not records:
        records.append(record_metrics(state.as_link(), 0, params.ring_count))
        if on_checkpoint:
            on_checkpoint(records[-1])
    stopped_by = "max_iterations"
    if _stalled(records, params):
        stopped_by = "stop_rule"
    else:
        bad_streak = 0
        last = start + params.max_iterations
        for it in range(start + 1, last + 1):
            state.shrink(params.shrink_step)
            closest = state.repair(params.overlap_passes)
            bad_streak = bad_streak + 1 if closest < 0.95 * DIAMETER else 0
            if bad_streak >= 100:
                raise AnnealError(
                    f"overlap repair failed to clear overlaps for 100 iterations "
                    f"(closest pair {closest:.4f} at iteration {it})"
                )
            if params.equilateralize:
                state.equilateralize()
            checkpoint = it % params.checkpoint_every == 0 or it == last
            if checkpoint:
                state.normalize()
                state.rebuild()
                records.append(record_metrics(state.as_link(), it, params.ring_count))
                log.debug("iteration %d ropelength %.5f", it, records[-1].ropelength)
                if on_checkpoint:
                    on_checkpoint(records[-1])
                if _stalled(records, params):
                    stopped_by = "stop_rule"
                    break
            elif state.moved_far():
                state.rebuild()
    return AnnealTrace(records, state.as_link(), params, provenance, stopped_by)


def anneal(link, params=None, provenance="", on_checkpoint=None):
    """Tighten ``link`` and record a metrics trace.

    Parameters
    ----------
    link : Link
    params : AnnealParams, optional
    provenance : str
        Free-form description of where the input came from.
    on_checkpoint : callable, optional
        Called with each :class:`TraceRecord` as soon as it is recorded.

    Returns
    -------
    AnnealTrace
        Records at iteration 0 and every checkpoint; ``final_link`` is at
        unit thickness.
    """
    params = params or AnnealParams()
    if params.equilateralize:
        provenance = f"{provenance}; equilateralized".lstrip("; ")
    return _run(link, params, [], provenance, on_checkpoint, normalize_first=True)


def resume(trace, on_checkpoint=None, **overrides):
    """Continue annealing from ``trace.final_link``, appending records.

    Keyword overrides replace fields of ``trace.params``; ``max_iterations``
    counts additional iterations.
    """
    if "n" in overrides or "counts" in overrides:
        raise InvariantError("vertex counts are fixed by the trace's final link")
    params = replace(trace.params, **overrides)
    if not overrides.get("max_iterations", 1):
        return AnnealTrace(list(trace.records), trace.final_link, params, trace.provenance, trace.stopped_by)
    records = list(trace.records)
    return _run(trace.final_link, params, records, trace.provenance, on_checkpoint, normalize_first=False)
