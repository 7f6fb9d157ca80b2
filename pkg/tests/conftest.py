import functools

import numpy as np
import pytest

from hypermhs import _kernels
from hypermhs.abelian import compute_periods
from hypermhs.chen import compute_iter_matrices
from hypermhs.curve import make_curve
from hypermhs.topology import build_homology_basis

CURVES = {
    "g1": [0, -1, 0, 1],
    "g2": [0, -1, 0, 0, 0, 1],
    "g3": [0, -1, 0, 0, 0, 0, 0, 1],
    "g2_generic": [1, 2, -1, 0.5, 3, 1],
}
P0 = 0.3 + 0.4j
Q0 = {"g1": -0.7 + 0.5j, "g2": -0.4 + 0.9j, "g3": -0.6 + 0.7j, "g2_generic": 0.2 - 0.3j}


@functools.lru_cache(maxsize=None)
def setup(name: str):
    curve = make_curve(CURVES[name])
    p = curve.point(P0)
    q = curve.point(Q0[name])
    loops = build_homology_basis(curve, p, q=q)
    periods = compute_periods(curve, loops)
    iters = compute_iter_matrices(curve, loops, periods.N)
    return curve, p, q, loops, periods, iters


@pytest.fixture(params=["g1", "g2", "g3"])
def std(request):
    return setup(request.param)


@pytest.fixture
def g1():
    return setup("g1")


@pytest.fixture
def g2():
    return setup("g2")


@pytest.fixture(params=sorted(_kernels.available()))
def kernel(request):
    return _kernels.available()[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(acceptance_log.LINES):
            terminalreporter.write_line(acceptance_log.LINES[n])
