"""Analytic continuation of y along x-paths and adaptive panel quadrature.

Every integral is assembled from panels: each path segment is first split
so that no panel is longer than twice its distance to the nearest
singular point, then each panel is bisected until a whole-panel
Gauss-Legendre evaluation agrees with the product of its two halves.
Panels return truncated signatures, so ordinary line integrals and
iterated integrals share one code path.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from . import _kernels
from .curve import CurveSpec, Differential, SurfacePoint
from .errors import FormSingularAtInfinity, InputError, NoConvergence, PoleOnPath
from .geometry import Line, SurfacePath, XPath, route
from .signature import Signature

PRESPLIT_MAX = 60


@dataclass(frozen=True)
class QuadratureConfig:
    nodes: int = 32
    max_depth: int = 12
    eps: float = 1e-10

    def __post_init__(self):
        if self.nodes < 4:
            raise InputError("nodes must be >= 4")
        if not self.eps > 0:
            raise InputError("eps must be positive")
        if self.max_depth < 0:
            raise InputError("max_depth must be >= 0")

    def doubled(self) -> "QuadratureConfig":
        return QuadratureConfig(2 * self.nodes, self.max_depth, self.eps)


DEFAULT_CONFIG = QuadratureConfig()


@dataclass
class ContinuationTrace:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    panels: list = field(default_factory=list)

    @property
    def y_end(self) -> complex:
        return complex(self.y[-1])


def _singular_points(curve: CurveSpec, letters: Sequence[Differential]) -> np.ndarray:
    pts = [np.asarray(curve.roots, dtype=complex)]
    for form in letters:
        pts.append(form.poles())
    return np.concatenate(pts)


def presplit(seg, singular: np.ndarray) -> list:
    """Split a segment into panels no longer than twice their singular distance."""
    out = []
    stack = [(0.0, 1.0, 0)]
    while stack:
        t0, t1, lvl = stack.pop()
        piece = seg.sub(t0, t1)
        dist = min((piece.distance(z) for z in singular), default=np.inf)
        if piece.length > 2.0 * dist and lvl < PRESPLIT_MAX:
            tm = 0.5 * (t0 + t1)
            stack.append((tm, t1, lvl + 1))
            stack.append((t0, tm, lvl + 1))
        else:
            out.append(piece)
    return out


def _check_poles(path_or_seg, letters, scale: float) -> None:
    for form in letters:
        for z in form.poles():
            if path_or_seg.distance(z) < 1e-9 * max(1.0, scale):
                raise PoleOnPath(f"{form!r} has a pole at x = {z} on the path")


def _letter_values(letters, x, y, dx):
    vals = np.empty((x.size, len(letters)), dtype=complex)
    for a, form in enumerate(letters):
        vals[:, a] = form(x, y) * dx
    return vals


def _make_xchart_evaluator(curve: CurveSpec, letters, seg, nodes: int):
    xg, _, _ = _kernels.gauss_rule(nodes)
    coeffs = np.asarray(curve.coefficients)
    track = _kernels.backend.track_sqrt

    def ev(a, b, y_a):
        h = 0.5 * (b - a)
        t = np.empty(nodes + 1)
        t[:nodes] = a + h * (xg + 1.0)
        t[nodes] = b
        x = seg.x(t)
        s = np.sqrt(P.polyval(x, coeffs))
        y, ok = track(s, y_a)
        vals = _letter_values(letters, x[:nodes], y[:nodes], seg.dx(t[:nodes]))
        return vals, complex(y[nodes]), ok, h

    return ev


def _adaptive(ev, depth_level: int, cfg: QuadratureConfig, y0: complex, m: int):
    """Signature of one panel (parameter range [0, 1]) by recursive bisection."""
    _, w, Q = _kernels.gauss_rule(cfg.nodes)
    sig_kernel = _kernels.backend.segment_signature

    def evaluate(a, b, y_a):
        vals, y_b, ok, h = ev(a, b, y_a)
        return Signature(sig_kernel(vals, h, Q, w, depth_level)), y_b, ok

    worst = [0.0]

    def rec(a, b, y_a, whole, depth):
        if whole is None:
            whole = evaluate(a, b, y_a)
        mid = 0.5 * (a + b)
        left = evaluate(a, mid, y_a)
        right = evaluate(mid, b, left[1])
        if whole[2] and left[2] and right[2]:
            comb = left[0] * right[0]
            err = 0.0
            for n in range(depth_level):
                ref = max(1.0, float(np.max(np.abs(comb.levels[n]))))
                err = max(err, float(np.max(np.abs(whole[0].levels[n] - comb.levels[n]))) / ref)
            yerr = abs(whole[1] - right[1]) / max(abs(right[1]), 1e-300)
            if err <= cfg.eps and yerr < 1e-6:
                return comb, right[1]
            worst[0] = err
        if depth >= cfg.max_depth:
            raise NoConvergence(
                f"panel did not converge at depth {depth}: error {worst[0]:.3e}", achieved=worst[0]
            )
        sl, ym = rec(a, mid, y_a, left, depth + 1)
        rw = right if ym == left[1] else None
        sr, yb = rec(mid, b, ym, rw, depth + 1)
        return sl * sr, yb

    return rec(0.0, 1.0, y0, None, 0)


def path_signature(
    curve: CurveSpec,
    letters: Sequence[Differential],
    path: SurfacePath,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    depth: int = 3,
):
    """All iterated integrals of length <= depth of ``letters`` along ``path``.

    Returns ``(signature, y_end)``.
    """
    letters = list(letters)
    m = len(letters)
    sing = _singular_points(curve, letters)
    _check_poles(path.xpath, letters, curve.diameter)
    sig = Signature.identity(m, depth)
    y = complex(path.y_start)
    for seg in path.xpath.segments:
        for piece in presplit(seg, sing):
            ev = _make_xchart_evaluator(curve, letters, piece, cfg.nodes)
            s, y = _adaptive(ev, depth, cfg, y, m)
            sig = sig * s
    return sig, y


def continue_y(curve: CurveSpec, path: SurfacePath, cfg: QuadratureConfig = DEFAULT_CONFIG) -> ContinuationTrace:
    """Sample y along ``path`` by nearest-sheet continuation."""
    sing = np.asarray(curve.roots, dtype=complex)
    coeffs = np.asarray(curve.coefficients)
    xg, _, _ = _kernels.gauss_rule(cfg.nodes)
    track = _kernels.backend.track_sqrt
    ts, xs, ys = [0.0], [path.xpath.start], [complex(path.y_start)]
    panels = []
    nseg = len(path.xpath.segments)
    y = complex(path.y_start)
    for k, seg in enumerate(path.xpath.segments):
        pieces = presplit(seg, sing)
        for piece in pieces:
            stack = [(0.0, 1.0, 0)]
            # refine until every step is unambiguous
            while stack:
                a, b, lvl = stack.pop()
                t = np.concatenate([a + 0.5 * (b - a) * (xg + 1.0), [b]])
                x = piece.x(t)
                yy, ok = track(np.sqrt(P.polyval(x, coeffs)), y)
                if not ok:
                    if lvl >= cfg.max_depth:
                        from .errors import ContinuationAmbiguous

                        raise ContinuationAmbiguous(f"sheet choice ambiguous near x = {x[0]}")
                    stack.append((0.5 * (a + b), b, lvl + 1))
                    stack.append((a, 0.5 * (a + b), lvl + 1))
                    continue
                y = complex(yy[-1])
                xs.extend(x.tolist())
                ys.extend(yy.tolist())
                ts.extend(((k + t) / max(nseg, 1)).tolist())
                panels.append(piece)
    return ContinuationTrace(np.asarray(ts), np.asarray(xs), np.asarray(ys), panels)


def line_integral(
    curve: CurveSpec, form: Differential, path: SurfacePath, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> complex:
    sig, _ = path_signature(curve, [form], path, cfg, depth=1)
    return complex(sig.levels[0][0])


def line_integrals(curve, forms, path, cfg: QuadratureConfig = DEFAULT_CONFIG) -> np.ndarray:
    sig, _ = path_signature(curve, list(forms), path, cfg, depth=1)
    return sig.levels[0].copy()


# ---------------------------------------------------------------- infinity


def _reverse_poly(c: np.ndarray) -> np.ndarray:
    return c[::-1] if c.size else c


def check_regular_at_infinity(curve: CurveSpec, form: Differential) -> None:
    g = curve.genus
    dr = form.r.size - 1
    if form.p.size and dr - (form.p.size - 1) < 2:
        raise FormSingularAtInfinity(f"{form!r}: dx-part has a pole at infinity")
    if form.q.size and (form.q.size - 1) - dr > g - 1:
        raise FormSingularAtInfinity(f"{form!r}: dx/y-part has a pole at infinity")


def _infinity_chart(curve: CurveSpec):
    """Coefficients (ascending in t) of s^2 = t^(4g+2) f(1/t^2)."""
    d = curve.degree
    c = np.asarray(curve.coefficients)
    S = np.zeros(2 * d + 1, dtype=complex)
    for j, cj in enumerate(c):
        S[2 * (d - j)] = cj
    return S


def _tchart_values(curve: CurveSpec, letters, t, s, dt):
    """Pullbacks of letters under x = 1/t^2, y = s / t^(2g+1)."""
    g = curve.genus
    u = t * t
    vals = np.empty((t.size, len(letters)), dtype=complex)
    for a, form in enumerate(letters):
        dr = form.r.size - 1
        rt = P.polyval(u, _reverse_poly(form.r))
        acc = np.zeros(t.size, dtype=complex)
        if form.p.size:
            dp = form.p.size - 1
            acc += -2.0 * t ** (2 * dr - 2 * dp - 3) * P.polyval(u, _reverse_poly(form.p)) / rt
        if form.q.size:
            dq = form.q.size - 1
            acc += -2.0 * t ** (2 * g - 2 + 2 * dr - 2 * dq) * P.polyval(u, _reverse_poly(form.q)) / (s * rt)
        vals[:, a] = acc * dt
    return vals


def integral_to_infinity(
    curve: CurveSpec,
    forms: Sequence[Differential],
    start: SurfacePoint,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    direction: complex | None = None,
) -> np.ndarray:
    """Integrals of ``forms`` from a finite point to infinity (odd degree).

    The path runs in the x-plane to a point ``x_R`` beyond every branch
    point, then radially outward, parametrized in the chart x = 1/t^2,
    y = s/t^(2g+1) so the endpoint t = 0 is a regular point of the
    integrand.
    """
    from .errors import EvenDegreeUnsupported

    if not curve.odd:
        raise EvenDegreeUnsupported("integration to infinity needs an odd-degree model")
    forms = list(forms)
    for form in forms:
        check_regular_at_infinity(curve, form)
    g = curve.genus
    roots = np.asarray(curve.roots)
    R = 2.0 * max(1.0, float(np.max(np.abs(roots))), abs(start.x))
    if direction is None:
        direction = start.x / abs(start.x) if abs(start.x) > 0 else 1.0
    xR = R * direction / abs(direction)
    obstacles = branch_obstacles(curve)
    xpath = route(start.x, xR, obstacles)
    first, yR = path_signature(curve, forms, SurfacePath(xpath, start.y), cfg, depth=1)

    tR = 1.0 / np.sqrt(xR)
    sR = yR * tR ** (2 * g + 1)
    Scoef = _infinity_chart(curve)
    seg = Line(complex(tR), 0j)
    sing_t = np.concatenate([P.polyroots(Scoef) if Scoef.size > 1 else np.zeros(0)] + [
        np.concatenate([np.sqrt(1 / z), -np.sqrt(1 / z)]) for z in (f.poles() for f in forms) if z.size
    ])
    sing_t = sing_t[np.isfinite(sing_t)]
    xg, _, _ = _kernels.gauss_rule(cfg.nodes)
    track = _kernels.backend.track_sqrt

    total = first.levels[0].copy()
    s_cur = complex(sR)
    for piece in presplit(seg, sing_t):

        def ev(a, b, s_a, piece=piece):
            h = 0.5 * (b - a)
            t = np.empty(cfg.nodes + 1)
            t[: cfg.nodes] = a + h * (xg + 1.0)
            t[cfg.nodes] = b
            tt = piece.x(t)
            ss, ok = track(np.sqrt(P.polyval(tt, Scoef)), s_a)
            vals = _tchart_values(curve, forms, tt[: cfg.nodes], ss[: cfg.nodes], piece.dx(t[: cfg.nodes]))
            return vals, complex(ss[-1]), ok, h

        sig, s_cur = _adaptive(ev, 1, cfg, s_cur, len(forms))
        total = total + sig.levels[0]
    return total


def branch_obstacles(curve: CurveSpec, extra=()) -> list:
    """Disks to steer routes around: branch points plus ``extra`` centers."""
    pts = list(curve.roots) + [complex(z) for z in extra]
    out = []
    for i, z in enumerate(pts):
        others = [abs(z - w) for j, w in enumerate(pts) if j != i]
        rho = 0.3 * min(others) if others else 0.3 * curve.diameter
        out.append((z, rho))
    return out
