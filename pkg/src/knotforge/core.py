"""Closed polygonal curves and their elementary geometry.

Lengths are in tube-radius units: a unit-thickness tube has diameter 2.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvariantError
from .validation import check_points, check_positive


@dataclass(frozen=True, eq=False)
class Component:
    """One closed polygon; an edge joins the last vertex back to the first.

    Parameters
    ----------
    vertices : array_like, shape (n, 3)
        Ordered vertex positions, ``n >= 3``. Consecutive vertices
        (cyclically) must be distinct.
    """

    vertices: np.ndarray

    def __post_init__(self):
        verts = check_points(self.vertices, min_points=3, name="vertices").copy()
        edges = np.roll(verts, -1, axis=0) - verts
        if np.any(np.einsum("ij,ij->i", edges, edges) == 0.0):
            raise InvariantError("consecutive vertices coincide (zero-length edge)")
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)

    @property
    def n(self):
        return self.vertices.shape[0]

    def edges(self):
        """Edge vectors ``v[i+1] - v[i]`` (cyclic), shape (n, 3)."""
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    def edge_lengths(self):
        return np.linalg.norm(self.edges(), axis=1)

    def __len__(self):
        return self.n


@dataclass(frozen=True, eq=False)
class Link:
    """An ordered collection of closed components; a knot has exactly one."""

    components: tuple
    name: str = field(default="")

    def __post_init__(self):
        comps = tuple(
            c if isinstance(c, Component) else Component(c) for c in self.components
        )
        if not comps:
            raise InvariantError("a link needs at least one component")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_arrays(cls, arrays, name=""):
        return cls(tuple(Component(a) for a in arrays), name=name)

    @property
    def n_components(self):
        return len(self.components)

    @property
    def counts(self):
        return tuple(c.n for c in self.components)

    @property
    def points(self):
        """All vertices stacked in component order, shape (sum n, 3)."""
        return np.vstack([c.vertices for c in self.components])

    def with_points(self, points, name=None):
        """A new link with the same component sizes and new coordinates."""
        points = np.asarray(points, dtype=np.float64)
        splits = np.cumsum(self.counts)[:-1]
        return Link(
            tuple(Component(p) for p in np.split(points, splits)),
            name=self.name if name is None else name,
        )


def contour_length(link):
    """Total perimeter of all components."""
    return float(sum(c.edge_lengths().sum() for c in link.components))


def centroid(component):
    """Uniformly weighted mean of the vertices."""
    if isinstance(component, Link):
        return component.points.mean(axis=0)
    return component.vertices.mean(axis=0)


def tangents(component):
    """Unit forward-edge tangents, one per vertex."""
    edges = component.edges()
    return edges / np.linalg.norm(edges, axis=1)[:, None]


def rescale(link, factor):
    """Multiply every coordinate by ``factor`` (> 0); the origin is fixed."""
    factor = check_positive(factor, "factor")
    return Link(tuple(Component(c.vertices * factor) for c in link.components), name=link.name)
