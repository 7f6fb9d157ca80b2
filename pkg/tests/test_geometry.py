import math

import pytest

from hypermhs.errors import DegenerateConfiguration
from hypermhs.geometry import Arc, Line, SurfacePath, XPath, route


def test_route_avoids_obstacles():
    obs = [(1.0, 0.2), (2.0 + 0.05j, 0.2)]
    xp = route(0, 3, obs)
    xp.check_continuity()
    assert abs(xp.start) < 1e-15 and abs(xp.end - 3) < 1e-15
    for c, r in obs:
        assert xp.distance(c) >= r - 1e-12


def test_route_overlap_rejected():
    with pytest.raises(DegenerateConfiguration):
        route(0, 3, [(1.0, 0.4), (1.5, 0.4)])


def test_reversal_and_join():
    a = XPath((Line(0, 1), Arc(1.5, 0.5, math.pi, 0)), 0)
    b = a.reversed()
    assert abs(b.start - a.end) < 1e-15 and abs(b.end - a.start) < 1e-15
    assert abs(a.length - (1 + 0.5 * math.pi)) < 1e-14
    with pytest.raises(ValueError):
        a + XPath((Line(5, 6),), 5)


def test_json_export():
    sp = SurfacePath(XPath((Line(0, 1j),), 0), 1 + 0j)
    js = sp.to_json()
    assert js["sheet_start"] == [1.0, 0.0]
    assert js["segments"][0]["type"] == "line"
