"""Geomview VECT polylines, trace CSV files and minima reports."""

import csv
import json
from pathlib import Path

import numpy as np

from .anneal import AnnealTrace, TraceRecord
from .core import Component, Link
from .exceptions import FormatError


class VectHeaderError(FormatError):
    """Missing or wrong ``VECT`` keyword or counts line."""


class VectCountError(FormatError):
    """Declared counts disagree with each other or with the data."""


class VectValueError(FormatError):
    """A token that should be numeric is not."""


class OpenPolylineError(FormatError):
    """A polyline is declared open; knots must be closed."""


def _tokens(text):
    """Yield (token, line number), dropping ``#`` comments."""
    for lineno, line in enumerate(text.splitlines(), 1):
        for tok in line.split("#", 1)[0].split():
            yield tok, lineno


class _Reader:
    def __init__(self, text, path):
        self._toks = list(_tokens(text))
        self._pos = 0
        self.path = path

    @property
    def line(self):
        if self._pos < len(self._toks):
            return self._toks[self._pos][1]
        return self._toks[-1][1] if self._toks else 1

    def take(self, kind, what):
        if self._pos >= len(self._toks):
            raise VectCountError(f"{self.path}: file ended while reading {what}", line=self.line)
        tok, lineno = self._toks[self._pos]
        self._pos += 1
        try:
            return kind(tok)
        except ValueError:
            raise VectValueError(f"{self.path}: expected {what}, got {tok!r}", line=lineno) from None

    def remaining(self):
        return len(self._toks) - self._pos


def read_vect(path, name=None):
    """Read a VECT file of closed polylines into a :class:`Link`.

    Colours are parsed for count checking and discarded.
    """
    path = Path(path)
    text = path.read_text()
    rd = _Reader(text, path)
    if rd.remaining() == 0:
        raise VectHeaderError(f"{path}: empty file", line=1)
    head_line = rd.line
    if rd.take(str, "header") != "VECT":
        raise VectHeaderError(f"{path}: first token must be VECT", line=head_line)
    try:
        n_lines = rd.take(int, "polyline count")
        n_verts = rd.take(int, "vertex count")
        n_colors = rd.take(int, "colour count")
    except VectValueError as exc:
        raise VectHeaderError(exc.message, line=exc.line) from None
    if n_lines < 1 or n_verts < 0 or n_colors < 0:
        raise VectHeaderError(f"{path}: invalid counts {n_lines} {n_verts} {n_colors}", line=head_line)
    sizes = []
    sizes_line = rd.line
    for k in range(n_lines):
        line = rd.line
        nv = rd.take(int, f"vertex count of polyline {k}")
        if nv >= 0:
            raise OpenPolylineError(
                f"{path}: polyline {k} is open (count {nv}); closed polylines use negative counts",
                line=line,
            )
        sizes.append(-nv)
    if sum(sizes) != n_verts:
        raise VectCountError(
            f"{path}: polyline sizes sum to {sum(sizes)}, header says {n_verts}", line=sizes_line
        )
    colors_line = rd.line
    colors = [rd.take(int, f"colour count of polyline {k}") for k in range(n_lines)]
    if sum(colors) != n_colors:
        raise VectCountError(
            f"{path}: colour counts sum to {sum(colors)}, header says {n_colors}", line=colors_line
        )
    coords = np.array([rd.take(float, "coordinate") for _ in range(3 * n_verts)]).reshape(-1, 3)
    for _ in range(4 * n_colors):
        rd.take(float, "colour component")
    if rd.remaining():
        raise VectCountError(f"{path}: {rd.remaining()} unexpected trailing tokens", line=rd.line)
    splits = np.cumsum(sizes)[:-1]
    comps = tuple(Component(c) for c in np.split(coords, splits))
    return Link(comps, name=name if name is not None else path.stem)


def format_vect(link):
    counts = link.counts
    lines = [
        "VECT",
        f"{len(counts)} {sum(counts)} 0",
        " ".join(str(-c) for c in counts),
        " ".join("0" for _ in counts),
    ]
    lines += [f"{x:.9g} {y:.9g} {z:.9g}" for x, y, z in link.points]
    return "\n".join(lines) + "\n"


def write_vect(link, path):
    """Write closed polylines (negative vertex counts), no colours."""
    path = Path(path)
    try:
        path.write_text(format_vect(link), encoding="ascii", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write VECT file {path}: {exc}") from exc
    return path


TRACE_COLUMNS = (
    "iteration",
    "length",
    "thickness",
    "ropelength",
    "point_hull",
    "tube_hull",
    "cross_section",
    "volume_fraction",
)


def _row(record):
    vals = [str(record.iteration)] + [repr(float(getattr(record, c))) for c in TRACE_COLUMNS[1:]]
    return ",".join(vals) + "\n"


class TraceWriter:
    """Append-only CSV writer; every row is flushed whole.

    Use as a callback for :func:`knotforge.anneal.anneal` so the file on disk
    is always a valid prefix of the full trace.
    """

    def __init__(self, path, append=False):
        self.path = Path(path)
        fresh = not (append and self.path.exists() and self.path.stat().st_size > 0)
        try:
            self._fh = self.path.open("a" if not fresh else "w", encoding="ascii", newline="\n")
        except OSError as exc:
            raise OSError(f"cannot open trace file {self.path}: {exc}") from exc
        if fresh:
            self._write(",".join(TRACE_COLUMNS) + "\n")

    def _write(self, text):
        self._fh.write(text)
        self._fh.flush()

    def __call__(self, record):
        self._write(_row(record))

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_trace_csv(trace, path):
    """Write every record of ``trace`` to ``path``."""
    with TraceWriter(path) as writer:
        for record in trace.records:
            writer(record)
    return Path(path)


def read_trace_csv(path):
    """Read a trace CSV into an :class:`AnnealTrace` without a final link."""
    path = Path(path)
    records = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != TRACE_COLUMNS:
            raise FormatError(f"{path}: unexpected header {header}", line=1)
        for lineno, row in enumerate(reader, 2):
            if len(row) != len(TRACE_COLUMNS):
                raise FormatError(f"{path}: expected {len(TRACE_COLUMNS)} fields", line=lineno)
            try:
                vals = [int(row[0])] + [float(v) for v in row[1:]]
            except ValueError as exc:
                raise FormatError(f"{path}: {exc}", line=lineno) from None
            rec = dict(zip(TRACE_COLUMNS, vals))
            records.append(TraceRecord(**rec, degenerate_hull=rec["point_hull"] == 0.0))
    return AnnealTrace(records, None, None, provenance=str(path))


def write_minima_json(reports, path):
    """Write a mapping ``metric -> MinimaReport`` as one JSON document."""
    payload = {metric: rep.to_dict() for metric, rep in reports.items()}
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="ascii")
    return Path(path)
