import csv
import os
import signal
import subprocess
import sys
import textwrap
import time
from pathlib import Path

import numpy as np
import pytest

from knotforge.anneal import AnnealParams, anneal
from knotforge.core import Component, Link
from knotforge.exceptions import FormatError
from knotforge.generators import TorusParams, circle, hopf_chain, torus_knot
from knotforge.io import (
    TRACE_COLUMNS,
    OpenPolylineError,
    TraceWriter,
    VectCountError,
    VectHeaderError,
    VectValueError,
    read_trace_csv,
    read_vect,
    write_minima_json,
    write_trace_csv,
    write_vect,
)
from knotforge.metrics import find_local_minima

DATA = Path(__file__).parent / "data"

TRIANGLE = "VECT\n1 3 0\n-3\n0\n0 0 0\n1 0 0\n0 1 0\n"


def write(tmp_path, text, name="k.vect"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_triangle(tmp_path):
    link = read_vect(write(tmp_path, TRIANGLE))
    assert link.counts == (3,)
    np.testing.assert_array_equal(link.points[1], [1, 0, 0])
    assert link.name == "k"


def test_three_polylines_with_colours():
    link = read_vect(DATA / "three_squares.vect")
    assert link.counts == (4, 4, 4)
    np.testing.assert_array_equal(link.components[2].vertices[:, 2], 4.0)


@pytest.mark.parametrize(
    "text,error,line",
    [
        ("", VectHeaderError, 1),
        ("VECTOR\n1 3 0\n", VectHeaderError, 1),
        ("VECT\n1 x 0\n", VectHeaderError, 2),
        ("VECT\n1 4 0\n-3\n0\n0 0 0\n1 0 0\n0 1 0\n", VectCountError, 3),
        ("VECT\n1 3 0\n-3\n0\n0 0 0\n1 0 zero\n0 1 0\n", VectValueError, 6),
        ("VECT\n1 3 0\n3\n0\n0 0 0\n1 0 0\n0 1 0\n", OpenPolylineError, 3),
        ("VECT\n1 3 0\n-3\n0\n0 0 0\n1 0 0\n", VectCountError, 6),
        ("VECT\n1 3 0\n-3\n0\n0 0 0\n1 0 0\n0 1 0\n7\n", VectCountError, 8),
        ("VECT\n1 3 1\n-3\n0\n0 0 0\n1 0 0\n0 1 0\n", VectCountError, 4),
    ],
)
def test_vect_errors(tmp_path, text, error, line):
    with pytest.raises(error) as err:
        read_vect(write(tmp_path, text))
    assert err.value.line == line
    assert f"line {line}" in str(err.value)
    assert isinstance(err.value, FormatError)


def test_roundtrip(tmp_path):
    link = hopf_chain("compact", 64)
    path = write_vect(link, tmp_path / "h.vect")
    back = read_vect(path)
    assert back.counts == link.counts
    np.testing.assert_allclose(back.points, link.points, rtol=1e-8, atol=1e-12)
    text = path.read_text().splitlines()
    assert text[0] == "VECT" and text[1] == "3 192 0"
    assert text[2] == "-64 -64 -64"


def test_write_is_byte_stable(tmp_path):
    link = torus_knot(TorusParams.standard(3))
    a = write_vect(link, tmp_path / "a.vect").read_bytes()
    b = write_vect(link, tmp_path / "b.vect").read_bytes()
    assert a == b


def test_write_reports_path(tmp_path):
    with pytest.raises(OSError, match="missing"):
        write_vect(Link((circle(1.0, 8),)), tmp_path / "missing" / "c.vect")


@pytest.fixture(scope="module")
def short_trace():
    link = Link((circle(3.0, 64),))
    return anneal(link, AnnealParams(shrink_step=0.2, checkpoint_every=10, max_iterations=30))


def test_trace_csv(tmp_path, short_trace):
    assert len(short_trace.records) == 4
    path = write_trace_csv(short_trace, tmp_path / "t.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(TRACE_COLUMNS)
    assert len(lines) == 5
    back = read_trace_csv(path)
    for a, b in zip(back.records, short_trace.records):
        assert a.iteration == b.iteration
        for col in TRACE_COLUMNS[1:]:
            assert getattr(a, col) == pytest.approx(getattr(b, col), rel=1e-9)


def test_trace_writer_appends(tmp_path, short_trace):
    path = tmp_path / "t.csv"
    with TraceWriter(path) as w:
        w(short_trace.records[0])
    with TraceWriter(path, append=True) as w:
        w(short_trace.records[1])
    assert len(read_trace_csv(path).records) == 2


def test_bad_trace_csv(tmp_path):
    path = write(tmp_path, "iteration,length\n1,2\n", "bad.csv")
    with pytest.raises(FormatError):
        read_trace_csv(path)
    path = write(tmp_path, ",".join(TRACE_COLUMNS) + "\n0,1,1,1,1,1,1\n", "short.csv")
    with pytest.raises(FormatError) as err:
        read_trace_csv(path)
    assert err.value.line == 2


def test_minima_json_roundtrip(tmp_path, short_trace):
    import json

    reports = {m: find_local_minima(short_trace, m, 1) for m in ("ropelength", "tube_hull")}
    path = write_minima_json(reports, tmp_path / "m.json")
    data = json.loads(path.read_text())
    assert set(data) == {"ropelength", "tube_hull"}
    assert data["tube_hull"] == reports["tube_hull"].to_dict()


RUNNER = textwrap.dedent(
    """
    import sys
    from knotforge.anneal import AnnealParams, anneal
    from knotforge.generators import TorusParams, torus_knot
    from knotforge.io import TraceWriter

    with TraceWriter(sys.argv[1]) as w:
        anneal(torus_knot(TorusParams.standard(3, 2, n=200)),
               AnnealParams(shrink_step=0.1, checkpoint_every=5, max_iterations=100000,
                            stop_rel_tol=1e-12), on_checkpoint=w)
    """
)


def test_killed_run_leaves_a_valid_prefix(tmp_path):
    path = tmp_path / "live.csv"
    proc = subprocess.Popen([sys.executable, "-c", RUNNER, str(path)])
    try:
        deadline = time.time() + 60
        while time.time() < deadline:
            if path.exists() and path.read_text().count("\n") >= 4:
                break
            time.sleep(0.05)
    finally:
        proc.send_signal(signal.SIGKILL)
        proc.wait()
    text = path.read_text()
    assert text.endswith("\n")
    rows = list(csv.reader(text.splitlines()))
    assert tuple(rows[0]) == TRACE_COLUMNS
    assert len(rows) >= 4
    assert all(len(r) == len(TRACE_COLUMNS) for r in rows)
    trace = read_trace_csv(path)
    its = [r.iteration for r in trace.records]
    assert its == sorted(its) and its[0] == 0
