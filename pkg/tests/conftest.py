import math

import numpy as np
import pytest

from knotforge.core import Component, Link
from knotforge.generators import TorusParams, circle, torus_knot


def ngon(n, radius=1.0):
    return Link((circle(radius, n),))


def random_rotation(rng):
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def t72():
    return torus_knot(TorusParams(7, 2, 4 + 7 / math.pi, 2.0, 400))


@pytest.fixture
def square():
    return Component([(1, 1, 0), (-1, 1, 0), (-1, -1, 0), (1, -1, 0)])


def cube_corners():
    return np.array([[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], dtype=float)


# acceptance criteria outcomes, printed at the end of the session
ACCEPTANCE = {}


def record_criterion(number, title, passed, detail):
    line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
