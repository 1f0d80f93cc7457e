"""Initial configurations: torus knots, circles, stadium curves, Hopf chains."""

import math
from dataclasses import dataclass

import numpy as np

from .core import Component, Link, contour_length
from .exceptions import InvariantError, SearchError
from .thickness import min_clearance, thickness
from .validation import check_count, check_positive, check_vector


@dataclass(frozen=True)
class TorusParams:
    """Parameters of a T(p, q) torus knot on a torus of radii R > r > 0.

    ``p`` counts windings around the tube, ``q`` windings around the axis.
    """

    p: int
    q: int
    major_radius: float
    minor_radius: float
    n: int

    def __post_init__(self):
        check_count(self.p, "p", minimum=1)
        check_count(self.q, "q", minimum=1)
        if math.gcd(self.p, self.q) != 1:
            raise InvariantError(f"gcd({self.p}, {self.q}) != 1: the curve is a link, not a knot")
        r = check_positive(self.minor_radius, "minor_radius")
        R = check_positive(self.major_radius, "major_radius")
        if not R > r:
            raise InvariantError(f"major radius {R} must exceed minor radius {r}")
        check_count(self.n, "n", minimum=3 * max(self.p, self.q))

    @classmethod
    def standard(cls, p, q=2, n=None):
        """Toric radii r = 2, R = 4 + p/pi; n defaults to 400 for q = 2, else 200."""
        if n is None:
            n = 400 if q == 2 else 200
        return cls(p, q, 4.0 + p / math.pi, 2.0, n)


def torus_points(p, q, major_radius, minor_radius, n):
    t = 2.0 * math.pi * np.arange(n) / n
    rho = major_radius + minor_radius * np.cos(p * t)
    return np.column_stack(
        [rho * np.cos(q * t), rho * np.sin(q * t), minor_radius * np.sin(p * t)]
    )


def torus_knot(params, name=None):
    """Sample the torus knot with vertex ``k`` at angle ``t = 2 pi k / n``.

    For ``q = 2`` this is the circular double helix: two passes around the
    z-axis while winding ``p`` times around the tube.
    """
    if not isinstance(params, TorusParams):
        params = TorusParams(*params)
    pts = torus_points(params.p, params.q, params.major_radius, params.minor_radius, params.n)
    link = Link((Component(pts),), name=name or f"T({params.p},{params.q})")
    if min_clearance(link) <= 0.0:
        raise InvariantError(f"n={params.n} is too small: the polygon self-intersects")
    return link


def _basis(normal):
    """Two unit vectors spanning the plane orthogonal to ``normal``."""
    axis = np.zeros(3)
    axis[np.argmin(np.abs(normal))] = 1.0
    u = np.cross(normal, axis)
    u /= np.linalg.norm(u)
    return u, np.cross(normal, u)


def _ring(center, u, v, radius, n, phase=0.0):
    theta = phase + 2.0 * math.pi * np.arange(n) / n
    return np.asarray(center) + radius * (np.outer(np.cos(theta), u) + np.outer(np.sin(theta), v))


def circle(radius, n, plane_normal=(0.0, 0.0, 1.0), center=(0.0, 0.0, 0.0)):
    """Regular n-gon inscribed in a circle."""
    radius = check_positive(radius, "radius")
    n = check_count(n, "n", minimum=3)
    normal = check_vector(plane_normal, "plane_normal")
    u, v = _basis(normal)
    return Component(_ring(np.asarray(center, dtype=float), u, v, radius, n))


def stadium(straight, radius, n, frame=None, center=(0.0, 0.0, 0.0)):
    """Two semicircles joined by two straight segments, sampled uniformly in arc length.

    Parameters
    ----------
    straight : float
        Length of each straight segment (>= 0).
    radius : float
        Radius of the end caps.
    n : int
        Total vertex count (>= 8).
    frame : array_like, shape (3, 3), optional
        Rows are the long axis, the in-plane transverse axis and the normal.
        Defaults to the identity (long axis along x, lying in the xy-plane).
    """
    straight = check_positive(straight, "straight", allow_zero=True)
    radius = check_positive(radius, "radius")
    n = check_count(n, "n", minimum=8)
    frame = np.eye(3) if frame is None else np.asarray(frame, dtype=float)
    half = straight / 2.0
    arc = math.pi * radius
    perimeter = 2.0 * arc + 2.0 * straight
    s = perimeter * np.arange(n) / n
    xy = np.empty((n, 2))
    # right cap from (half, -r) to (half, r), top straight leftwards, left cap, bottom straight
    bounds = np.cumsum([arc, straight, arc])
    seg = np.searchsorted(bounds, s, side="right")
    for k in range(4):
        m = seg == k
        u = s[m] - (bounds[k - 1] if k else 0.0)
        if k == 0:
            ang = -math.pi / 2 + u / radius
            xy[m] = np.column_stack([half + radius * np.cos(ang), radius * np.sin(ang)])
        elif k == 1:
            xy[m] = np.column_stack([half - u, np.full(u.shape, radius)])
        elif k == 2:
            ang = math.pi / 2 + u / radius
            xy[m] = np.column_stack([-half + radius * np.cos(ang), radius * np.sin(ang)])
        else:
            xy[m] = np.column_stack([-half + u, np.full(u.shape, -radius)])
    local = np.column_stack([xy, np.zeros(n)])
    return Component(np.asarray(center, dtype=float) + local @ frame)


HOPF_CONFIGURATIONS = ("elongated", "compact")


def hopf_chain(configuration="elongated", n_per_component=400):
    """Three-component tight Hopf chain: circle, stadium, circle.

    The stadium (cap radius 2, straights 2) lies in the xy-plane with its long
    axis along x and cap centres at (+-1, 0, 0). Every outer circle has radius 2,
    passes through a cap centre and is centred on the stadium, so linked
    centrelines sit exactly 2 apart.

    - ``elongated``: both circles in the xz-plane, centred on the cap apexes
      (+-3, 0, 0); the tube fills a 12 x 6 x 6 box.
    - ``compact``: both circles turned a quarter turn to stand in the planes
      x = +-1, centred on the cap/straight joints (+-1, 2, 0); they rest
      against each other and the tube fills an 8 x 8 x 6 box.
    """
    n = check_count(n_per_component, "n_per_component", minimum=16)
    if configuration not in HOPF_CONFIGURATIONS:
        raise InvariantError(
            f"unknown Hopf configuration {configuration!r}; expected one of {HOPF_CONFIGURATIONS}"
        )
    middle = stadium(2.0, 2.0, n)
    ex, ey, ez = np.eye(3)
    if configuration == "elongated":
        left = _ring((-3.0, 0.0, 0.0), ex, ez, 2.0, n)
        right = _ring((3.0, 0.0, 0.0), ex, ez, 2.0, n)
    else:
        left = _ring((-1.0, 2.0, 0.0), ey, ez, 2.0, n)
        right = _ring((1.0, 2.0, 0.0), ey, ez, 2.0, n)
    return Link((Component(left), middle, Component(right)), name=f"hopf-{configuration}")


@dataclass(frozen=True)
class HelixSearch:
    """Grid-then-refine settings for :func:`minimize_double_helix`.

    The grid spans the ratio ``r / R`` over ``ratio_range``; thickness
    normalization makes the absolute scale irrelevant, so only the shape
    ratio matters. Grid ties go to the smallest ratio.
    """

    ratio_range: tuple = (0.05, 0.6)
    grid: int = 24
    refine_steps: int = 40
    tol: float = 1e-7


def _unit_length(p, ratio, n):
    pts = torus_points(p, 2, 1.0, ratio, n)
    link = Link((Component(pts),))
    report = thickness(link)
    if report.degenerate:
        return np.inf
    return contour_length(link) / report.thickness


def minimize_double_helix(p, n=400, search=None):
    """Tightest circular double helix T(p, 2) over its torus radii.

    Scale is fixed by unit-thickness normalization, so the search is over the
    radius ratio ``r / R`` with ``R = 1``; a coarse grid brackets the minimum
    and golden-section refinement narrows it.

    Returns
    -------
    major_radius, minor_radius, length : float
        Radii of the unit-thickness minimizer and its contour length.
    """
    p = check_count(p, "p", minimum=3)
    if p % 2 == 0:
        raise InvariantError(f"p must be odd for T(p, 2) to be a knot, got {p}")
    search = search or HelixSearch()
    lo, hi = search.ratio_range
    grid = np.linspace(lo, hi, search.grid)
    values = np.array([_unit_length(p, x, n) for x in grid])
    k = int(np.argmin(values))
    if k == 0 or k == len(grid) - 1 or not np.isfinite(values[k]):
        raise SearchError(f"ratio window {search.ratio_range} does not bracket a minimum for p={p}")
    a, b = grid[k - 1], grid[k + 1]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = _unit_length(p, c, n), _unit_length(p, d, n)
    for _ in range(search.refine_steps):
        if b - a < search.tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = _unit_length(p, c, n)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = _unit_length(p, d, n)
    ratio = c if fc <= fd else d
    link = Link((Component(torus_points(p, 2, 1.0, ratio, n)),))
    tau = thickness(link).thickness
    return 1.0 / tau, ratio / tau, contour_length(link) / tau
