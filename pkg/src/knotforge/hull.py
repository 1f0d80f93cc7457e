"""Convex hulls, hull volumes, tube point clouds and bounding boxes."""

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .core import centroid, tangents
from .exceptions import DegenerateHullError, FormatError, MeshError
from .validation import check_count, check_points

# facet-visibility / containment tolerance, relative to the bounding-box diagonal
HULL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Closed triangle mesh with outward (counter-clockwise seen from outside) faces."""

    points: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=np.float64))
        object.__setattr__(self, "faces", np.asarray(self.faces, dtype=np.int64).reshape(-1, 3))

    @property
    def vertex_indices(self):
        """Sorted indices of points referenced by at least one face."""
        return np.unique(self.faces)

    def check(self):
        """Raise :class:`MeshError` unless the mesh is closed and consistently oriented."""
        f = self.faces
        if f.size == 0:
            raise MeshError("mesh has no faces")
        if f.min() < 0 or f.max() >= len(self.points):
            raise MeshError("face index out of range")
        directed = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
        # each directed edge once, and its reverse present: closed and coherently oriented
        keys = directed[:, 0] * len(self.points) + directed[:, 1]
        rev = directed[:, 1] * len(self.points) + directed[:, 0]
        if len(np.unique(keys)) != len(keys) or not np.isin(rev, keys).all():
            raise MeshError("mesh is open or inconsistently oriented")
        if signed_volume(self) <= 0.0:
            raise MeshError("mesh faces point inward")
        return self


def signed_volume(mesh):
    """Divergence-theorem volume: sum of origin-based signed tetrahedra."""
    a, b, c = (mesh.points[mesh.faces[:, k]] for k in range(3))
    return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)


def affine_rank(points):
    """Dimension (0 to 3) of the affine span of ``points``."""
    pts = np.asarray(points, dtype=np.float64)
    centred = pts - pts.mean(axis=0)
    scale = np.abs(centred).max()
    if scale == 0.0:
        return 0
    sv = np.linalg.svd(centred / scale, compute_uv=False)
    return int(np.sum(sv > HULL_TOL * sv[0] * np.sqrt(len(pts))))


def convex_hull(points):
    """Convex hull of a 3-D point set as an outward-oriented :class:`TriMesh`.

    Uses Qhull's quickhull with triangulated output. Faces index into the
    original ``points`` array.

    Raises
    ------
    DegenerateHullError
        Fewer than 4 points, or the points do not span three dimensions.
    """
    pts = check_points(points, name="points")
    if len(pts) < 4:
        raise DegenerateHullError(f"need at least 4 points, got {len(pts)}", rank=affine_rank(pts))
    rank = affine_rank(pts)
    if rank < 3:
        raise DegenerateHullError(f"points span only {rank} dimension(s)", rank=rank)
    try:
        qh = ConvexHull(pts, qhull_options="Qt")
    except QhullError as exc:
        raise DegenerateHullError(f"qhull failed: {exc}", rank=rank) from exc
    faces = qh.simplices.copy()
    a, b, c = (pts[faces[:, k]] for k in range(3))
    normal = np.cross(b - a, c - a)
    flip = np.einsum("ij,ij->i", normal, qh.equations[:, :3]) < 0.0
    faces[flip] = faces[flip][:, [0, 2, 1]]
    return TriMesh(pts, faces)


def hull_volume(mesh):
    """Enclosed volume of a closed, outward-oriented mesh."""
    mesh.check()
    # translate to the mesh centroid first for round-off stability
    shifted = TriMesh(mesh.points - mesh.points[mesh.vertex_indices].mean(axis=0), mesh.faces)
    return signed_volume(shifted)


def contains(mesh, points, tol=HULL_TOL):
    """Whether every point lies on or inside every face plane.

    Tolerance is relative to the bounding-box diagonal of the mesh points.
    """
    pts = np.asarray(points, dtype=np.float64)
    a, b, c = (mesh.points[mesh.faces[:, k]] for k in range(3))
    normal = np.cross(b - a, c - a)
    norm = np.linalg.norm(normal, axis=1)
    # slivers from triangulating coplanar facets carry no plane of their own
    keep = norm > 0.0
    normal = normal[keep] / norm[keep, None]
    offset = np.einsum("ij,ij->i", normal, a[keep])
    diag = np.linalg.norm(np.ptp(mesh.points, axis=0))
    return bool(np.all(pts @ normal.T - offset <= tol * diag))


def point_hull_volume(link):
    """Hull volume of the centreline vertices."""
    return hull_volume(convex_hull(link.points))


@dataclass(frozen=True, eq=False)
class TubeCloud:
    """Unit circles of ``ring_count`` points around every vertex.

    ``points`` has ``ring_count`` consecutive rows per vertex in link order.
    ``fallbacks`` counts vertices whose tangent was parallel to the radial
    direction.
    """

    points: np.ndarray
    ring_count: int
    fallbacks: int = 0


def _ring_frames(component, center):
    """Orthonormal ring axes e1, e2 at each vertex (both normal to the tangent)."""
    t = tangents(component)
    radial = component.vertices - center
    e1 = np.cross(t, radial)
    norm = np.linalg.norm(e1, axis=1)
    bad = norm < 1e-9
    if bad.any():
        # axis with the smallest tangent component is never parallel to t
        axes = np.eye(3)[np.argmin(np.abs(t[bad]), axis=1)]
        e1[bad] = np.cross(t[bad], axes)
        norm[bad] = np.linalg.norm(e1[bad], axis=1)
    e1 /= norm[:, None]
    e2 = np.cross(t, e1)
    e2 /= np.linalg.norm(e2, axis=1)[:, None]
    return e1, e2, int(bad.sum())


def tube_cloud(link, ring_count=20, radius=1.0):
    """Point cloud approximating the unit-radius tube around the centreline.

    Each vertex ``v`` with forward tangent ``t`` gets a ring
    ``v + cos(a) e1 + sin(a) e2`` with ``e1 = t x (v - c) / |.|``,
    ``e2 = t x e1 / |.|`` and ``c`` the centroid of the whole link.
    """
    ring_count = check_count(ring_count, "ring_count", minimum=3)
    center = centroid(link)
    angle = 2.0 * np.pi * np.arange(ring_count) / ring_count
    cos, sin = np.cos(angle), np.sin(angle)
    clouds, fallbacks = [], 0
    for comp in link.components:
        e1, e2, bad = _ring_frames(comp, center)
        fallbacks += bad
        ring = radius * (cos[None, :, None] * e1[:, None, :] + sin[None, :, None] * e2[:, None, :])
        clouds.append((comp.vertices[:, None, :] + ring).reshape(-1, 3))
    if fallbacks:
        warnings.warn(
            f"{fallbacks} vertex tangent(s) parallel to the radial direction; used a fixed axis",
            RuntimeWarning,
            stacklevel=2,
        )
    return TubeCloud(np.vstack(clouds), ring_count, fallbacks)


def tube_hull_volume(link, ring_count=20):
    """Hull volume of :func:`tube_cloud`."""
    return hull_volume(convex_hull(tube_cloud(link, ring_count).points))


def aabb_volume(link, inflate=0.0):
    """Axis-aligned bounding box volume with each side grown by ``2 * inflate``."""
    return float(np.prod(np.ptp(link.points, axis=0) + 2.0 * inflate))


def export_mesh(mesh, path):
    """Write ``v x y z`` / ``f i j k`` records (1-based, 9 significant digits).

    Only points referenced by faces are written.
    """
    used = mesh.vertex_indices
    remap = np.full(len(mesh.points), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    lines = [f"v {x:.9g} {y:.9g} {z:.9g}" for x, y, z in mesh.points[used]]
    lines += [f"f {a} {b} {c}" for a, b, c in remap[mesh.faces] + 1]
    path = Path(path)
    try:
        path.write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write mesh to {path}: {exc}") from exc
    return path


def import_mesh(path):
    """Read a file written by :func:`export_mesh`."""
    path = Path(path)
    verts, faces = [], []
    with path.open(encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            try:
                if parts[0] == "v" and len(parts) == 4:
                    verts.append([float(p) for p in parts[1:]])
                elif parts[0] == "f" and len(parts) == 4:
                    faces.append([int(p) - 1 for p in parts[1:]])
                else:
                    raise ValueError(f"unexpected record {parts[0]!r}")
            except ValueError as exc:
                raise FormatError(f"{path}: {exc}", line=lineno) from exc
    return TriMesh(np.array(verts, dtype=np.float64).reshape(-1, 3), np.array(faces, dtype=np.int64))
