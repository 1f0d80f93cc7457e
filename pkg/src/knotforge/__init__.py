"""Tighten knots at unit tube radius and track their convex hull volumes."""

from .anneal import AnnealParams, AnnealTrace, TraceRecord, anneal, equilateralize, resume
from .core import Component, Link, centroid, contour_length, rescale, tangents
from .estimators import HullFeatures, KnotAnnealer
from .exceptions import (
    AnnealError,
    DegenerateEmbeddingError,
    DegenerateHullError,
    FormatError,
    InvariantError,
    KnotforgeError,
    MeshError,
    SearchError,
)
from .generators import (
    HelixSearch,
    TorusParams,
    circle,
    hopf_chain,
    minimize_double_helix,
    stadium,
    torus_knot,
)
from .hull import (
    TriMesh,
    TubeCloud,
    aabb_volume,
    convex_hull,
    export_mesh,
    hull_volume,
    import_mesh,
    point_hull_volume,
    tube_cloud,
    tube_hull_volume,
)
from .io import read_trace_csv, read_vect, write_minima_json, write_trace_csv, write_vect
from .metrics import (
    GyrationSpectrum,
    MinimaReport,
    axis_span,
    cross_section_estimate,
    find_local_minima,
    gyration_tensor,
    hull_ratio,
    volume_fraction,
)
from .thickness import (
    ThicknessReport,
    min_circumradius,
    min_clearance,
    normalize_to_unit_thickness,
    ropelength,
    thickness,
)

__version__ = "0.1.0"
