"""Polygonal thickness, ropelength and unit-thickness normalization.

Thickness of a polygonal link is taken as

    tau = min(min triple circumradius, min non-adjacent segment distance / 2)

which converges to the smooth tube thickness under refinement.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np

from .core import contour_length, rescale
from .exceptions import DegenerateEmbeddingError


@dataclass(frozen=True)
class ThicknessReport:
    thickness: float
    limiting_factor: str
    min_clearance: float
    min_circumradius: float

    @property
    def degenerate(self):
        """True when the tube has zero radius (touching or crossing strands)."""
        return not self.thickness > 0.0


def closest_points(p0, p1, q0, q1):
    """Closest-point parameters of segment pairs, vectorized over rows.

    Parameters
    ----------
    p0, p1, q0, q1 : ndarray, shape (m, 3)
        Endpoints of the first and second segment of each pair. Segments must
        have nonzero length.

    Returns
    -------
    s, t : ndarray, shape (m,)
        Parameters in [0, 1] of the closest points ``p0 + s (p1 - p0)`` and
        ``q0 + t (q1 - q0)``.
    """
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0 - q0
    a = np.einsum("ij,ij->i", d1, d1)
    e = np.einsum("ij,ij->i", d2, d2)
    b = np.einsum("ij,ij->i", d1, d2)
    c = np.einsum("ij,ij->i", d1, r)
    f = np.einsum("ij,ij->i", d2, r)
    denom = a * e - b * b
    # parallel segments: any s works, start from p0
    parallel = denom <= 1e-14 * a * e
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(parallel, 0.0, np.clip((b * f - c * e) / denom, 0.0, 1.0))
    t = (b * s + f) / e
    lo = t < 0.0
    hi = t > 1.0
    s = np.where(lo, np.clip(-c / a, 0.0, 1.0), s)
    s = np.where(hi, np.clip((b - c) / a, 0.0, 1.0), s)
    t = np.clip(t, 0.0, 1.0)
    return s, t


def segment_distances(p0, p1, q0, q1):
    """Minimum distance between segment pairs, vectorized over rows."""
    s, t = closest_points(p0, p1, q0, q1)
    diff = (p0 + (p1 - p0) * s[:, None]) - (q0 + (q1 - q0) * t[:, None])
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


class _Segments:
    """Flattened segment table of a link."""

    def __init__(self, link):
        starts, ends, prev, nxt, comp, local = [], [], [], [], [], []
        for k, c in enumerate(link.components):
            v = c.vertices
            e = c.edges()
            starts.append(v)
            ends.append(np.roll(v, -1, axis=0))
            prev.append(np.roll(e, 1, axis=0))
            nxt.append(np.roll(e, -1, axis=0))
            comp.append(np.full(c.n, k))
            local.append(np.arange(c.n))
        self.starts = np.vstack(starts)
        self.ends = np.vstack(ends)
        # edge arriving at each start vertex, edge leaving each end vertex
        self.prev = np.vstack(prev)
        self.next = np.vstack(nxt)
        self.comp = np.concatenate(comp)
        self.local = np.concatenate(local)
        self.sizes = np.asarray(link.counts)
        length = np.linalg.norm(self.ends - self.starts, axis=1)
        # |e_in| |e_out| at the start and end vertex of each segment
        self.start_norms = np.linalg.norm(self.prev, axis=1) * length
        self.end_norms = length * np.linalg.norm(self.next, axis=1)

    def __len__(self):
        return len(self.starts)

    def non_adjacent(self, i, j):
        """Mask of pairs (i, j) that do not share a vertex."""
        same = self.comp[i] == self.comp[j]
        n = self.sizes[self.comp[i]]
        gap = np.abs(self.local[i] - self.local[j])
        gap = np.minimum(gap, n - gap)
        return ~same | (gap >= 2)

    def _vertex_critical(self, e_in, e_out, norms, w):
        """Sign test: offset ``w`` from a polygon vertex is critical when the
        distance does not decrease along both incident edges."""
        prod = np.einsum("ij,ij->i", w, e_in) * np.einsum("ij,ij->i", w, e_out)
        return prod <= _CRITICAL_TOL * np.einsum("ij,ij->i", w, w) * norms

    def _vertex_to_segment(self, i, j):
        """Doubly critical candidates between the start vertex of ``i`` and segment ``j``."""
        v = self.starts[i]
        q0 = self.starts[j]
        d = self.ends[j] - q0
        t = np.clip(np.einsum("ij,ij->i", v - q0, d) / np.einsum("ij,ij->i", d, d), 0.0, 1.0)
        w = v - (q0 + d * t[:, None])
        dist = np.sqrt(np.einsum("ij,ij->i", w, w))
        ok = self._vertex_critical(self.prev[i], self.ends[i] - v, self.start_norms[i], w)
        # a foot clamped to an endpoint of j is a vertex too
        at_start, at_end = t <= 0.0, t >= 1.0
        corner = at_start | at_end
        if corner.any():
            k, c = j[corner], at_start[corner]
            e_in = np.where(c[:, None], self.prev[k], d[corner])
            e_out = np.where(c[:, None], d[corner], self.next[k])
            norms = np.where(c, self.start_norms[k], self.end_norms[k])
            ok[corner] &= self._vertex_critical(e_in, e_out, norms, -w[corner])
        return dist, ok

    def pair_min(self, i, j, cutoff=np.inf):
        """Smallest doubly critical distance among segment pairs (i, j).

        Candidates are the interior closest points of the two segments and
        the feet of each start vertex on the other segment. Together these
        enumerate every doubly critical pair of the polygons, including
        pairs where one strand has a local maximum of the distance. Every
        candidate of a pair is at least the pair's segment distance, so
        pairs at or beyond ``cutoff`` are dropped before the vertex tests.
        """
        if i.size == 0:
            return np.inf
        p0, p1 = self.starts[i], self.ends[i]
        q0, q1 = self.starts[j], self.ends[j]
        s, t = closest_points(p0, p1, q0, q1)
        w = (p0 + (p1 - p0) * s[:, None]) - (q0 + (q1 - q0) * t[:, None])
        dist = np.sqrt(np.einsum("ij,ij->i", w, w))
        interior = (s > 0.0) & (s < 1.0) & (t > 0.0) & (t < 1.0)
        candidates = [dist[interior | (dist == 0.0)]]
        near = dist < cutoff
        i, j = i[near], j[near]
        for a, b in ((i, j), (j, i)):
            d, ok = self._vertex_to_segment(a, b)
            candidates.append(d[ok | (d == 0.0)])
        out = np.concatenate(candidates)
        return float(out.min()) if out.size else np.inf


# relative slack on the sign test at polygon vertices
_CRITICAL_TOL = 1e-9


def min_clearance_bruteforce(link):
    """Minimum clearance by scanning every non-adjacent segment pair."""
    segs = _Segments(link)
    i, j = np.triu_indices(len(segs), k=1)
    keep = segs.non_adjacent(i, j)
    return segs.pair_min(i[keep], j[keep])


def _grid_pairs(starts, ends, cell):
    """Segment pairs (i < j) whose midpoints fall in the same or neighbouring cells."""
    mids = 0.5 * (starts + ends)
    keys = np.floor(mids / cell).astype(np.int64)
    keys -= keys.min(axis=0) - 1
    dims = keys.max(axis=0) + 2
    code = (keys[:, 0] * dims[1] + keys[:, 1]) * dims[2] + keys[:, 2]
    order = np.argsort(code, kind="stable")
    sorted_code = code[order]
    out_i, out_j = [], []
    for off in product((-1, 0, 1), repeat=3):
        if off < (0, 0, 0):
            continue
        target = code + (off[0] * dims[1] + off[1]) * dims[2] + off[2]
        lo = np.searchsorted(sorted_code, target, side="left")
        hi = np.searchsorted(sorted_code, target, side="right")
        counts = hi - lo
        src = np.repeat(np.arange(len(code)), counts)
        # position within each run of matches
        start = np.repeat(lo - np.cumsum(counts) + counts, counts)
        dst = order[start + np.arange(counts.sum())]
        if off == (0, 0, 0):
            keep = src < dst
            src, dst = src[keep], dst[keep]
        out_i.append(np.minimum(src, dst))
        out_j.append(np.maximum(src, dst))
    return np.concatenate(out_i), np.concatenate(out_j)


def min_clearance(link, cell_size=2.0):
    """Minimum self-distance of the link between strands that share no vertex.

    A segment pair counts when it shares no vertex (pairs in different
    components always qualify) and its closest points are doubly critical:
    the connecting chord is a critical point of the distance along both
    strands. Without that filter every fine polygon would report roughly its
    edge length, since segments two apart are always that close.

    A uniform grid restricts the scan to nearby pairs; the result is
    identical to :func:`min_clearance_bruteforce`. Returns 0 when strands
    touch or cross.
    """
    segs = _Segments(link)
    extent = np.abs(segs.ends - segs.starts).max()
    span = np.ptp(np.vstack([segs.starts, segs.ends]), axis=0).max()
    target = float(cell_size)
    while target < span:
        # every pair closer than `target` has midpoints less than one cell apart
        i, j = _grid_pairs(segs.starts, segs.ends, target + extent)
        keep = segs.non_adjacent(i, j)
        best = segs.pair_min(i[keep], j[keep], cutoff=target)
        if best < target:
            return best
        target *= 2.0
    return min_clearance_bruteforce(link)


def circumradii(points):
    """Circumradius of each cyclic vertex triple (v[i-1], v[i], v[i+1]).

    Collinear triples give ``inf``.
    """
    prev = np.roll(points, 1, axis=0)
    nxt = np.roll(points, -1, axis=0)
    a = np.linalg.norm(points - prev, axis=1)
    b = np.linalg.norm(nxt - points, axis=1)
    c = np.linalg.norm(nxt - prev, axis=1)
    cross = np.linalg.norm(np.cross(points - prev, nxt - prev), axis=1)
    with np.errstate(divide="ignore"):
        return np.where(cross > 0.0, a * b * c / (2.0 * cross), np.inf)


def min_circumradius(link):
    """Smallest circumradius over all consecutive vertex triples."""
    return float(min(circumradii(c.vertices).min() for c in link.components))


def thickness(link):
    """Largest admissible tube radius of the polygonal link.

    A zero result is not raised; check :attr:`ThicknessReport.degenerate`.
    """
    clearance = min_clearance(link)
    circ = min_circumradius(link)
    if clearance / 2.0 <= circ:
        return ThicknessReport(clearance / 2.0, "clearance", clearance, circ)
    return ThicknessReport(circ, "curvature", clearance, circ)


def _require_thickness(link):
    report = thickness(link)
    if report.degenerate:
        raise DegenerateEmbeddingError(
            f"link {link.name!r} has zero thickness "
            f"(min clearance {report.min_clearance:.3g})"
        )
    return report.thickness


def ropelength(link):
    """Contour length over thickness; invariant under scaling."""
    return contour_length(link) / _require_thickness(link)


def normalize_to_unit_thickness(link):
    """Rescale so the thickness is exactly 1."""
    return rescale(link, 1.0 / _require_thickness(link))
