"""Hyperelliptic curves y^2 = f(x), their points, divisors and differentials.

Coefficients are listed in ascending degree.  A curve of degree ``d`` has
genus ``(d - 1) // 2``; when ``d`` is odd the point at infinity is a
branch point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (
    ClearanceViolation,
    DegreeTooSmall,
    EvenDegreeUnsupported,
    InputError,
    NotSquarefree,
    PointNotOnCurve,
)

POINT_TOL = 1e-10
CLEARANCE_FACTOR = 1e-3


def _parse_coefficient(c) -> complex:
    if isinstance(c, str):
        return complex(c.replace(" ", ""))
    if isinstance(c, (tuple, list)):
        if len(c) != 2:
            raise InputError(f"coefficient pair expected, got {c!r}")
        return complex(float(c[0]), float(c[1]))
    return complex(c)


def _polish_root(coeffs: np.ndarray, r: complex, iters: int = 8) -> complex:
    dcoeffs = P.polyder(coeffs)
    for _ in range(iters):
        fr = P.polyval(r, coeffs)
        dfr = P.polyval(r, dcoeffs)
        if dfr == 0:
            break
        step = fr / dfr
        r = r - step
        if abs(step) <= 1e-17 * max(1.0, abs(r)):
            break
    return complex(r)


@dataclass(frozen=True)
class CurveSpec:
    """The curve y^2 = f(x) with precomputed branch data."""

    coefficients: tuple
    degree: int
    genus: int
    roots: tuple
    source: tuple = field(default=(), compare=False)

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1

    @property
    def branch_points(self) -> tuple:
        """Finite branch x-values, plus ``None`` standing for infinity."""
        return self.roots + ((None,) if self.odd else ())

    @property
    def coeff_scale(self) -> float:
        return max(abs(c) for c in self.coefficients)

    @property
    def diameter(self) -> float:
        r = np.asarray(self.roots)
        return float(np.max(np.abs(r[:, None] - r[None, :])))

    @property
    def clearance(self) -> float:
        """Minimal admissible distance between p, q and branch x-values."""
        return CLEARANCE_FACTOR * self.diameter

    def f(self, x):
        return P.polyval(x, np.asarray(self.coefficients))

    def sqrt_f(self, x):
        return np.sqrt(self.f(x))

    def point(self, x: complex, y: complex | None = None, *, branch: bool = False) -> "SurfacePoint":
        """Build a checked finite point; ``y`` defaults to the principal root."""
        x = complex(x)
        fx = complex(self.f(x))
        if y is None:
            y = complex(np.sqrt(fx))
        y = complex(y)
        if abs(y * y - fx) > POINT_TOL * (1.0 + abs(fx)):
            raise PointNotOnCurve(f"|y^2 - f(x)| = {abs(y * y - fx):.3e} at x = {x}")
        pt = SurfacePoint(x, y, branch=branch)
        if not branch:
            d = min(abs(x - e) for e in self.roots)
            if d <= self.clearance:
                raise ClearanceViolation(
                    f"point x = {x} lies within {d:.3e} of a branch point "
                    f"(clearance {self.clearance:.3e})"
                )
        return pt

    def branch_point(self, k: int) -> "SurfacePoint":
        return SurfacePoint(complex(self.roots[k]), 0j, branch=True)

    @property
    def infinity(self) -> "SurfacePoint":
        if not self.odd:
            raise EvenDegreeUnsupported("an even-degree model has two points at infinity")
        return INFINITY

    def to_json(self) -> dict:
        return {"f": [list(s) for s in self.source]}


@dataclass(frozen=True)
class SurfacePoint:
    x: complex | None
    y: complex | None
    branch: bool = False

    @property
    def at_infinity(self) -> bool:
        return self.x is None

    def __repr__(self):
        if self.at_infinity:
            return "SurfacePoint(inf)"
        return f"SurfacePoint(x={self.x!r}, y={self.y!r})"


INFINITY = SurfacePoint(None, None, branch=True)


class Divisor(Mapping):
    """Finite formal sum of points with integer multiplicities."""

    def __init__(self, terms: Mapping | Iterable = ()):
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for pt, m in items:
            acc[pt] = acc.get(pt, 0) + int(m)
        self._terms = {pt: m for pt, m in acc.items() if m != 0}

    def __getitem__(self, pt):
        return self._terms[pt]

    def __iter__(self):
        return iter(self._terms)

    def __len__(self):
        return len(self._terms)

    @property
    def degree(self) -> int:
        return sum(self._terms.values())

    def __add__(self, other: "Divisor") -> "Divisor":
        return Divisor(list(self.items()) + list(other.items()))

    def __neg__(self) -> "Divisor":
        return Divisor({pt: -m for pt, m in self.items()})

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __rmul__(self, k: int) -> "Divisor":
        return Divisor({pt: k * m for pt, m in self.items()})

    def __repr__(self):
        return "Divisor(" + " + ".join(f"{m}*{pt!r}" for pt, m in self.items()) + ")"

    @classmethod
    def point(cls, pt: SurfacePoint, m: int = 1) -> "Divisor":
        return cls({pt: m})


def make_curve(coefficients: Sequence) -> CurveSpec:
    """Construct a curve from ascending coefficients of f.

    Each coefficient may be a number, a string such as ``"1.5-2j"`` or a pair
    of decimal strings ``("re", "im")``.
    """
    source = []
    vals = []
    for c in coefficients:
        v = _parse_coefficient(c)
        vals.append(v)
        source.append((repr(v.real), repr(v.imag)) if not isinstance(c, (list, tuple)) else (str(c[0]), str(c[1])))
    while vals and vals[-1] == 0:
        vals.pop()
        source.pop()
    d = len(vals) - 1
    if d < 3:
        raise DegreeTooSmall(f"degree {d} < 3 gives genus 0")
    coeffs = np.asarray(vals, dtype=complex)
    raw = np.roots(coeffs[::-1])
    roots = [_polish_root(coeffs, r) for r in raw]

    cscale = float(np.max(np.abs(coeffs)))
    rscale = max(1.0, max(abs(r) for r in roots))
    sep_tol = 1e-6 * rscale
    dcoeffs = P.polyder(coeffs)
    for i in range(d):
        for j in range(i + 1, d):
            if abs(roots[i] - roots[j]) < sep_tol:
                raise NotSquarefree(f"roots {roots[i]} and {roots[j]} coincide within {sep_tol:.1e}")
    for r in roots:
        deriv = abs(P.polyval(r, dcoeffs))
        if deriv < 1e-8 * cscale * max(1.0, abs(r)) ** (d - 1):
            raise NotSquarefree(f"f'({r}) vanishes: repeated root")
        res = abs(P.polyval(r, coeffs))
        if res > 1e-12 * cscale * max(1.0, abs(r)) ** d:
            raise NotSquarefree(f"root refinement failed at {r}: residual {res:.2e}")
    roots.sort(key=lambda z: (round(z.real, 12), round(z.imag, 12)))
    return CurveSpec(
        coefficients=tuple(complex(c) for c in coeffs),
        degree=d,
        genus=(d - 1) // 2,
        roots=tuple(roots),
        source=tuple(source),
    )


def canonical_divisor(curve: CurveSpec) -> Divisor:
    """Divisor of dx/y on an odd-degree model: (2g - 2) * infinity."""
    if not curve.odd:
        raise EvenDegreeUnsupported("canonical divisor is only provided for odd-degree models")
    return Divisor({INFINITY: 2 * curve.genus - 2})


def hyperelliptic_conjugate(pt: SurfacePoint) -> SurfacePoint:
    if pt.at_infinity:
        raise InputError("conjugate of infinity is not defined here (finite points only)")
    if pt.branch:
        return pt
    return SurfacePoint(pt.x, -pt.y, branch=False)


class Differential:
    """The rational differential (p(x) + q(x)/y) dx / r(x).

    Any rational r(x, y) dx on a hyperelliptic curve reduces to this shape
    using y^2 = f(x).  Polynomials are ascending coefficient arrays.
    """

    __slots__ = ("p", "q", "r", "label")

    def __init__(self, p=(0,), q=(0,), r=(1,), label: str = ""):
        self.p = np.trim_zeros(np.asarray(p, dtype=complex), "b")
        self.q = np.trim_zeros(np.asarray(q, dtype=complex), "b")
        self.r = np.trim_zeros(np.asarray(r, dtype=complex), "b")
        if self.r.size == 0:
            raise InputError("zero denominator")
        self.label = label

    @property
    def odd(self) -> bool:
        """True when the form changes sign under y -> -y."""
        return self.p.size == 0

    def poles(self) -> np.ndarray:
        if self.r.size <= 1:
            return np.zeros(0, dtype=complex)
        return P.polyroots(self.r)

    def __call__(self, x, y):
        num = 0
        if self.p.size:
            num = P.polyval(x, self.p)
        if self.q.size:
            num = num + P.polyval(x, self.q) / y
        if self.r.size == 1:
            return num / self.r[0]
        return num / P.polyval(x, self.r)

    def __repr__(self):
        return f"Differential({self.label or 'anon'})"


def holomorphic_basis(curve: CurveSpec) -> list:
    """The forms x^(k-1) dx / y for k = 1..g."""
    out = []
    for k in range(curve.genus):
        q = np.zeros(k + 1, dtype=complex)
        q[k] = 1.0
        out.append(Differential(q=q, label=f"x^{k}dx/y"))
    return out


def combine_holomorphic(curve: CurveSpec, weights: np.ndarray, label: str = "") -> Differential:
    """sum_k weights[k] x^k dx / y."""
    return Differential(q=np.asarray(weights, dtype=complex), label=label)


def third_kind(q: SurfacePoint, q2: SurfacePoint) -> Differential:
    """Third-kind form with residue +1/(2 pi i) at ``q`` and -1/(2 pi i) at ``q2``.

    It is (1/2pi i) [(y + y_q)/(x - x_q) - (y + y_q2)/(x - x_q2)] dx / (2y);
    on an odd-degree model it has no further poles.
    """
    if q.at_infinity or q2.at_infinity:
        raise InputError("finite points required")
    c = 1.0 / (4j * np.pi)
    a, b = q.x, q2.x
    r = P.polymul([-a, 1.0], [-b, 1.0])
    if a == b:
        # (y_q - y_q2) / ((x - a) y)
        return Differential(q=[c * (q.y - q2.y)], r=[-a, 1.0], label="eta")
    p = [c * (a - b)]
    qq = c * (q.y * np.array([-b, 1.0]) - q2.y * np.array([-a, 1.0]))
    return Differential(p=p, q=qq, r=r, label="eta")
