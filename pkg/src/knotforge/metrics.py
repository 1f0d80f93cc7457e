"""Shape observables and local-minimum analysis of annealing traces."""

import json
from dataclasses import dataclass, field

import numpy as np

from .core import contour_length
from .exceptions import DegenerateHullError, KnotforgeError
from .hull import point_hull_volume, tube_hull_volume
from .validation import check_count, check_vector


@dataclass(frozen=True)
class GyrationSpectrum:
    """Principal moments of the gyration tensor, largest first."""

    eigenvalues: tuple

    @property
    def squared_radius_of_gyration(self):
        return float(sum(self.eigenvalues))


def gyration_tensor(link):
    """Second-moment tensor of the vertices about their centroid.

    Returns
    -------
    tensor : ndarray, shape (3, 3)
    spectrum : GyrationSpectrum
    """
    pts = link.points
    centred = pts - pts.mean(axis=0)
    tensor = centred.T @ centred / len(pts)
    evals = np.linalg.eigvalsh(tensor)[::-1]
    # round-off can leave planar curves with a tiny negative moment
    evals = np.clip(evals, 0.0, None)
    return tensor, GyrationSpectrum(tuple(float(e) for e in evals))


def cross_section_estimate(link):
    """Geometric mean of the two smallest gyration moments, sqrt(l2 * l3)."""
    _, spec = gyration_tensor(link)
    return float(np.sqrt(spec.eigenvalues[1] * spec.eigenvalues[2]))


def volume_fraction(link, hull):
    """Fraction pi L / V of the hull occupied by a unit-radius tube."""
    if not hull > 0.0:
        raise DegenerateHullError(f"hull volume must be positive, got {hull}", rank=2)
    return float(np.pi * contour_length(link) / hull)


def hull_ratio(link, ring_count=20):
    """Tube hull volume over point hull volume."""
    return tube_hull_volume(link, ring_count) / point_hull_volume(link)


def axis_span(link, axis):
    """Extent of the vertices projected onto ``axis``."""
    proj = link.points @ check_vector(axis, "axis")
    return float(proj.max() - proj.min())


INTERIOR = "interior local min"
ENDPOINT = "endpoint min"


@dataclass(frozen=True)
class MinimumEntry:
    index: int
    length: float
    value: float
    kind: str


@dataclass(frozen=True)
class MinimaReport:
    entries: tuple = field(default_factory=tuple)
    global_min_is_final: bool = True
    metric: str = ""

    @property
    def interior(self):
        return tuple(e for e in self.entries if e.kind == INTERIOR)

    def to_dict(self):
        return {
            "metric": self.metric,
            "global_min_is_final": self.global_min_is_final,
            "entries": [
                {"index": e.index, "length": e.length, "value": e.value, "kind": e.kind}
                for e in self.entries
            ],
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def moving_average(values, window):
    """Centred moving average; the window shrinks near the ends."""
    values = np.asarray(values, dtype=np.float64)
    window = check_count(window, "smoothing_window")
    if window == 1:
        return values.copy()
    half_lo = (window - 1) // 2
    half_hi = window - 1 - half_lo
    csum = np.concatenate([[0.0], np.cumsum(values)])
    idx = np.arange(len(values))
    lo = np.maximum(idx - half_lo, 0)
    hi = np.minimum(idx + half_hi + 1, len(values))
    return (csum[hi] - csum[lo]) / (hi - lo)


def find_minima(values, lengths=None, smoothing_window=5, metric="", rel_tol=1e-4):
    """Local minima of a checkpoint sequence.

    Interior minima are indices whose smoothed value is strictly below both
    neighbours. The endpoint entry is whichever end of the sequence is lower.
    ``global_min_is_final`` compares raw values: the last checkpoint must be
    within ``rel_tol`` of the overall minimum.
    """
    values = np.asarray(values, dtype=np.float64)
    if len(values) < 3:
        raise KnotforgeError(f"need at least 3 checkpoints, got {len(values)}")
    lengths = np.full(len(values), np.nan) if lengths is None else np.asarray(lengths, dtype=float)
    smooth = moving_average(values, smoothing_window)
    inner = np.flatnonzero((smooth[1:-1] < smooth[:-2]) & (smooth[1:-1] < smooth[2:])) + 1
    entries = [MinimumEntry(int(k), float(lengths[k]), float(values[k]), INTERIOR) for k in inner]
    end = 0 if values[0] < values[-1] else len(values) - 1
    entries.append(MinimumEntry(end, float(lengths[end]), float(values[end]), ENDPOINT))
    entries.sort(key=lambda e: e.index)
    vmin = values.min()
    final = bool(values[-1] - vmin <= rel_tol * abs(vmin))
    return MinimaReport(tuple(entries), final, metric)


TRACE_METRICS = (
    "length",
    "thickness",
    "ropelength",
    "point_hull",
    "tube_hull",
    "cross_section",
    "volume_fraction",
)


def find_local_minima(trace, metric="tube_hull", smoothing_window=5):
    """Local minima of one metric along an annealing trace."""
    if metric not in TRACE_METRICS:
        raise KnotforgeError(f"unknown metric {metric!r}; choose from {TRACE_METRICS}")
    records = trace.records
    values = [getattr(r, metric) for r in records]
    lengths = [r.length for r in records]
    return find_minima(values, lengths, smoothing_window, metric=metric)
