"""scikit-learn compatible wrappers around the annealer and the hull metrics."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .anneal import AnnealParams, anneal, record_metrics
from .thickness import normalize_to_unit_thickness
from .validation import as_link


def _as_links(X):
    """A batch of knots: a single Link/array becomes a one-element list."""
    if hasattr(X, "components") or (isinstance(X, np.ndarray) and X.ndim == 2):
        return [as_link(X)]
    return [as_link(x) for x in X]


class KnotAnnealer(TransformerMixin, BaseEstimator):
    """Tighten knots at unit tube radius.

    ``fit`` anneals the first (or only) knot in ``X`` and keeps its trace;
    ``transform`` anneals every knot in ``X`` with the same settings and
    returns the tightened links.

    Attributes
    ----------
    trace_ : AnnealTrace
    link_ : Link
        Final unit-thickness configuration.
    ropelength_ : float
    n_iter_ : int
    """

    def __init__(
        self,
        shrink_step=0.01,
        overlap_passes=10,
        checkpoint_every=50,
        stop_window=20,
        stop_rel_tol=1e-6,
        max_iterations=200_000,
        equilateralize=False,
        ring_count=20,
    ):
        self.shrink_step = shrink_step
        self.overlap_passes = overlap_passes
        self.checkpoint_every = checkpoint_every
        self.stop_window = stop_window
        self.stop_rel_tol = stop_rel_tol
        self.max_iterations = max_iterations
        self.equilateralize = equilateralize
        self.ring_count = ring_count

    def _params(self):
        return AnnealParams(**self.get_params())

    def fit(self, X, y=None):
        link = _as_links(X)[0]
        self.trace_ = anneal(link, self._params(), provenance=link.name)
        self.link_ = self.trace_.final_link
        self.ropelength_ = self.trace_.records[-1].ropelength
        self.n_iter_ = self.trace_.iterations
        return self

    def transform(self, X):
        check_is_fitted(self, "trace_")
        params = self._params()
        return [anneal(link, params).final_link for link in _as_links(X)]

    def fit_transform(self, X, y=None, **fit_params):
        links = _as_links(X)
        self.fit(links[:1])
        params = self._params()
        return [self.link_] + [anneal(link, params).final_link for link in links[1:]]


class HullFeatures(TransformerMixin, BaseEstimator):
    """Per-knot shape features at unit thickness.

    Columns: length, thickness, ropelength, point_hull, tube_hull,
    cross_section, volume_fraction, hull_ratio. Input links are normalized
    to unit thickness first unless ``normalize=False``.
    """

    feature_names = (
        "length",
        "thickness",
        "ropelength",
        "point_hull",
        "tube_hull",
        "cross_section",
        "volume_fraction",
        "hull_ratio",
    )

    def __init__(self, ring_count=20, normalize=True):
        self.ring_count = ring_count
        self.normalize = normalize

    def fit(self, X, y=None):
        self.n_features_out_ = len(self.feature_names)
        return self

    def _row(self, link):
        if self.normalize:
            link = normalize_to_unit_thickness(link)
        rec = record_metrics(link, 0, self.ring_count)
        ratio = rec.tube_hull / rec.point_hull if rec.point_hull > 0 else np.nan
        return [
            rec.length,
            rec.thickness,
            rec.ropelength,
            rec.point_hull,
            rec.tube_hull,
            rec.cross_section,
            rec.volume_fraction,
            ratio,
        ]

    def transform(self, X):
        check_is_fitted(self, "n_features_out_")
        return np.array([self._row(link) for link in _as_links(X)], dtype=np.float64)

    def get_feature_names_out(self, input_features=None):
        return np.array(self.feature_names, dtype=object)
