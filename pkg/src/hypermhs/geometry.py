"""Piecewise paths in the x-plane and their lifts to the curve."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateConfiguration


@dataclass(frozen=True)
class Line:
    a: complex
    b: complex

    kind = "line"

    def x(self, t):
        return self.a + (self.b - self.a) * t

    def dx(self, t):
        return (self.b - self.a) * np.ones_like(t)

    @property
    def start(self):
        return self.a

    @property
    def end(self):
        return self.b

    @property
    def length(self) -> float:
        return abs(self.b - self.a)

    def reversed(self) -> "Line":
        return Line(self.b, self.a)

    def sub(self, t0: float, t1: float) -> "Line":
        return Line(self.x(t0), self.x(t1))

    def distance(self, z: complex) -> float:
        d = self.b - self.a
        L2 = abs(d) ** 2
        if L2 == 0:
            return abs(z - self.a)
        t = min(1.0, max(0.0, ((z - self.a) * d.conjugate()).real / L2))
        return abs(z - self.x(t))

    def to_json(self):
        return {"type": "line", "a": [self.a.real, self.a.imag], "b": [self.b.real, self.b.imag]}


@dataclass(frozen=True)
class Arc:
    """x = center + radius * exp(i theta), theta running from theta0 to theta1."""

    center: complex
    radius: float
    theta0: float
    theta1: float

    kind = "arc"

    def x(self, t):
        return self.center + self.radius * np.exp(1j * (self.theta0 + (self.theta1 - self.theta0) * t))

    def dx(self, t):
        th = self.theta0 + (self.theta1 - self.theta0) * t
        return 1j * self.radius * (self.theta1 - self.theta0) * np.exp(1j * th)

    @property
    def start(self):
        return complex(self.x(0.0))

    @property
    def end(self):
        return complex(self.x(1.0))

    @property
    def length(self) -> float:
        return self.radius * abs(self.theta1 - self.theta0)

    def reversed(self) -> "Arc":
        return Arc(self.center, self.radius, self.theta1, self.theta0)

    def sub(self, t0: float, t1: float) -> "Arc":
        d = self.theta1 - self.theta0
        return Arc(self.center, self.radius, self.theta0 + d * t0, self.theta0 + d * t1)

    def distance(self, z: complex) -> float:
        w = z - self.center
        lo, hi = sorted((self.theta0, self.theta1))
        if hi - lo >= 2 * math.pi:
            return abs(abs(w) - self.radius)
        if abs(w) > 0:
            phi = cmath.phase(w)
            # shift phi into [lo, lo + 2pi)
            phi = lo + (phi - lo) % (2 * math.pi)
            if phi <= hi:
                return abs(abs(w) - self.radius)
        return min(abs(z - self.start), abs(z - self.end))

    def to_json(self):
        return {
            "type": "arc",
            "center": [self.center.real, self.center.imag],
            "radius": self.radius,
            "theta": [self.theta0, self.theta1],
        }


@dataclass(frozen=True)
class XPath:
    segments: tuple = ()
    origin: complex | None = None

    @property
    def start(self) -> complex:
        return self.segments[0].start if self.segments else self.origin

    @property
    def end(self) -> complex:
        return self.segments[-1].end if self.segments else self.origin

    @property
    def length(self) -> float:
        return sum(s.length for s in self.segments)

    def reversed(self) -> "XPath":
        return XPath(tuple(s.reversed() for s in reversed(self.segments)), self.end)

    def __add__(self, other: "XPath") -> "XPath":
        if self.segments and other.segments and abs(self.end - other.start) > 1e-12 * max(1.0, abs(self.end)):
            raise ValueError(f"paths do not join: {self.end} vs {other.start}")
        return XPath(self.segments + other.segments, self.origin if self.origin is not None else other.origin)

    def distance(self, z: complex) -> float:
        if not self.segments:
            return abs(z - self.origin) if self.origin is not None else math.inf
        return min(s.distance(z) for s in self.segments)

    def check_continuity(self, tol: float = 1e-12) -> None:
        for s0, s1 in zip(self.segments, self.segments[1:]):
            if abs(s0.end - s1.start) > tol * max(1.0, abs(s0.end)):
                raise ValueError("segments do not share endpoints")


@dataclass(frozen=True)
class SurfacePath:
    """An x-path together with the starting value of y (which fixes the sheet)."""

    xpath: XPath
    y_start: complex
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def x_start(self):
        return self.xpath.start

    def to_json(self) -> dict:
        return {
            "segments": [s.to_json() for s in self.xpath.segments],
            "sheet_start": [self.y_start.real, self.y_start.imag],
        }


def constant_path(x: complex, y: complex) -> SurfacePath:
    return SurfacePath(XPath((), complex(x)), complex(y))


def route(x0: complex, x1: complex, obstacles) -> XPath:
    """Straight segment from x0 to x1, bent around obstacle disks by arcs.

    ``obstacles`` is a sequence of ``(center, radius)``.  Radii are shrunk so
    the endpoints stay outside every disk; the minor arc is taken around each
    disk the segment cuts through.
    """
    x0, x1 = complex(x0), complex(x1)
    d = x1 - x0
    L = abs(d)
    if L == 0:
        return XPath((), x0)
    u = d / L
    hits = []
    for c, rho in obstacles:
        c = complex(c)
        rho = min(rho, 0.45 * abs(c - x0), 0.45 * abs(c - x1))
        if rho <= 0:
            raise DegenerateConfiguration(f"route endpoint sits on obstacle {c}")
        rel = (c - x0) * u.conjugate()
        s, dperp = rel.real, rel.imag
        if abs(dperp) < rho and 0 < s < L:
            half = math.sqrt(rho * rho - dperp * dperp)
            hits.append((s - half, s + half, c, rho))
    hits.sort(key=lambda h: h[0])
    for h0, h1 in zip(hits, hits[1:]):
        if h1[0] <= h0[1]:
            raise DegenerateConfiguration("overlapping obstacles along route")
    segs = []
    cur = x0
    for s_in, s_out, c, rho in hits:
        p_in = x0 + u * s_in
        p_out = x0 + u * s_out
        if abs(p_in - cur) > 0:
            segs.append(Line(cur, p_in))
        th0 = cmath.phase(p_in - c)
        th1 = cmath.phase(p_out - c)
        dth = (th1 - th0 + math.pi) % (2 * math.pi) - math.pi
        if abs(abs(dth) - math.pi) < 1e-12:
            dth = math.pi
        segs.append(Arc(c, rho, th0, th0 + dth))
        cur = segs[-1].end
    if abs(x1 - cur) > 0:
        segs.append(Line(cur, x1))
    return XPath(tuple(segs), x0)
