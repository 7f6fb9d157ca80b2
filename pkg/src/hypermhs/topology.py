"""Based loops on the curve: a canonical system of generators and the puncture loop.

Construction
------------
A *hub* point h is chosen in the x-plane so that straight rays from h to the
finite branch points keep well clear of each other.  With the branch points
ordered counter-clockwise around h, ``l_k`` is the loop that runs along the
k-th ray, circles the branch point once and returns.  Its lift flips the
sheet, and on the curve ``l_k^2`` is contractible.

With ``s_k = l_k l_{k+1}`` the words

    a_k = s_{2k-1},
    b_k = (s_{2k+1} s_{2k+3} ... s_{2g-1}) (s_{2k} s_{2k+1} ... s_{2g})^(-1)

satisfy ``[a_1, b_1] ... [a_g, b_g] = (l_1 ... l_{2g+1})^2`` in the free
product of the ``<l_k | l_k^2>``, and that right-hand side lifts to a loop
around infinity (odd degree) or around the omitted branch point (even
degree), which is contractible on the compact curve.  So the lifted words
form a canonical system of based loops, not merely a symplectic homology
basis.  Loops are based at p by conjugating with one connector p -> h.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .curve import CurveSpec, SurfacePoint, holomorphic_basis
from .errors import (
    DegenerateConfiguration,
    InputError,
    NotPositive,
    RadiusTooLarge,
)
from .geometry import Arc, Line, SurfacePath, XPath, constant_path, route
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, continue_y, path_signature
from .signature import Signature

DELTA = "delta"

# Intersection number s_k . s_{k+1} of consecutive lifted chain cycles for
# a counter-clockwise star with counter-clockwise loops.
CHAIN_SIGN = 1


# ------------------------------------------------------------------ star


@dataclass(frozen=True)
class Star:
    hub: complex
    order: tuple  # indices into curve.roots, counter-clockwise
    radii: tuple  # circle radius around each ordered branch point
    score: float

    @property
    def n(self) -> int:
        return len(self.order)

    def centers(self, curve: CurveSpec) -> list:
        return [curve.roots[i] for i in self.order]

    def loop(self, curve: CurveSpec, k: int) -> XPath:
        """The x-path of l_k (k is 1-based in counter-clockwise order)."""
        e = curve.roots[self.order[k - 1]]
        r = self.radii[k - 1]
        u = (self.hub - e) / abs(self.hub - e)
        tip = e + r * u
        th = cmath.phase(u)
        return XPath(
            (Line(self.hub, tip), Arc(e, r, th, th + 2 * math.pi), Line(tip, self.hub)),
            self.hub,
        )

    def obstacles(self, curve: CurveSpec) -> list:
        return [(curve.roots[i], r) for i, r in zip(self.order, self.radii)]


def _seg_point_dist(a, b, z):
    """Distances from points z (array) to segments [a, b] (broadcast)."""
    d = b - a
    L2 = np.abs(d) ** 2
    t = np.clip(((z - a) * np.conj(d)).real / np.where(L2 == 0, 1.0, L2), 0.0, 1.0)
    return np.abs(z - (a + d * t))


def _star_score(h: complex, E: np.ndarray, avoid: np.ndarray) -> tuple:
    n = E.size
    # dist[k, j] = distance from point j to ray k
    dist = _seg_point_dist(h, E[:, None], E[None, :])
    np.fill_diagonal(dist, np.inf)
    ray_clear = dist.min(axis=1)
    hub_clear = np.abs(E - h).min()
    score = min(ray_clear.min(), hub_clear)
    if avoid.size:
        da = _seg_point_dist(h, E[:, None], avoid[None, :])
        score = min(score, da.min(), np.abs(avoid - h).min())
    return score, dist


@lru_cache(maxsize=64)
def choose_star(curve: CurveSpec, avoid: tuple = ()) -> Star:
    """Pick the hub maximizing the clearance of the ray star (deterministic grid search)."""
    E = np.asarray(curve.roots, dtype=complex)
    A = np.asarray(avoid, dtype=complex)
    D = curve.diameter
    c0 = E.mean()
    grid = np.linspace(-0.6, 0.6, 25)
    best = None
    for v in grid:
        for u in grid:
            h = c0 + D * (u + 1j * v)
            sc, _ = _star_score(h, E, A)
            if best is None or sc > best[0] + 1e-12 * D:
                best = (sc, h)
    score, h = best
    if score < 1e-6 * D:
        raise DegenerateConfiguration("no hub gives a clear ray star; perturb the branch points")
    _, dist = _star_score(h, E, A)
    n = E.size
    radii = []
    for k in range(n):
        cand = [abs(h - E[k])]
        cand += [abs(E[j] - E[k]) for j in range(n) if j != k]
        cand += [dist[j, k] for j in range(n) if j != k]
        cand += [abs(a - E[k]) for a in A]
        radii.append(0.3 * min(cand))
    ang = np.angle(E - h)
    idx = list(np.argsort(ang, kind="stable"))
    srt = ang[idx]
    gaps = np.diff(np.concatenate([srt, [srt[0] + 2 * np.pi]]))
    start = (int(np.argmax(gaps)) + 1) % n
    order = tuple(int(i) for i in idx[start:] + idx[:start])
    return Star(complex(h), order, tuple(radii[i] for i in order), float(score / D))


@lru_cache(maxsize=64)
def star_loop_signatures(curve: CurveSpec, star: Star, cfg: QuadratureConfig, depth: int = 3):
    """Signatures of every l_k for the basis x^j dx/y, starting at the principal y at the hub.

    Returns ``(y_hub, [Signature, ...])``.
    """
    y_hub = complex(np.sqrt(curve.f(star.hub)))
    forms = holomorphic_basis(curve)
    sigs = []
    for k in range(1, star.n + 1):
        sig, y_end = path_signature(curve, forms, SurfacePath(star.loop(curve, k), y_hub), cfg, depth)
        if abs(y_end + y_hub) > 1e-8 * abs(y_hub):
            raise DegenerateConfiguration(f"loop l_{k} does not flip the sheet")
        sigs.append(sig)
    return y_hub, tuple(sigs)


# ------------------------------------------------------------------ words


def canonical_words(g: int) -> list:
    """Words in the l_k (1-based, exponent +-1) for a_1..a_g, b_1..b_g."""

    def sigma(i, e=1):
        w = [(i, 1), (i + 1, 1)]
        return w if e == 1 else [(k, -x) for k, x in reversed(w)]

    a = [sigma(2 * k - 1) for k in range(1, g + 1)]
    b = []
    for k in range(1, g + 1):
        w = []
        for j in range(2 * k + 1, 2 * g, 2):
            w += sigma(j)
        tail = []
        for j in range(2 * k, 2 * g + 1):
            tail += sigma(j)
        w += [(i, -e) for i, e in reversed(tail)]
        b.append(w)
    return a + b


def free_reduce(word, involutive: bool = False) -> list:
    """Free reduction; with ``involutive`` every generator squares to 1."""
    out = []
    for gen, e in word:
        if involutive:
            e = 1
        if out and out[-1][0] == gen and (involutive or out[-1][1] == -e):
            out.pop()
        else:
            out.append((gen, e))
    return out


def word_inverse(word) -> list:
    return [(gen, -e) for gen, e in reversed(word)]


def commutator(x, y) -> list:
    return x + y + word_inverse(x) + word_inverse(y)


def homology_class(word, n: int) -> np.ndarray:
    """Coefficients on the half-cycles of l_1..l_n of a lifted even word."""
    c = np.zeros(n, dtype=np.int64)
    sheet = 1
    for k, _ in word:
        c[k - 1] += sheet
        sheet = -sheet
    if sheet != 1:
        raise InputError("odd word does not close on the curve")
    return c


def chain_coordinates(word, g: int) -> np.ndarray:
    """Coordinates of a lifted word on the chain cycles s_1..s_2g."""
    c = homology_class(word, 2 * g + 1)
    x = np.cumsum(c)
    if x[-1] != 0:
        raise InputError("word uses generators beyond l_(2g+1)")
    return x[: 2 * g]


def chain_intersection_matrix(g: int, sign: int = CHAIN_SIGN) -> np.ndarray:
    n = 2 * g
    C = np.zeros((n, n), dtype=np.int64)
    for k in range(n - 1):
        C[k, k + 1] = sign
        C[k + 1, k] = -sign
    return C


def standard_symplectic(g: int) -> np.ndarray:
    J = np.zeros((2 * g, 2 * g), dtype=np.int64)
    J[:g, g:] = np.eye(g, dtype=np.int64)
    J[g:, :g] = -np.eye(g, dtype=np.int64)
    return J


def symplectic_normal_form(M: np.ndarray) -> np.ndarray:
    """Unimodular T with ``T M T^T`` the standard symplectic matrix.

    ``M`` must be an integer skew-symmetric matrix of determinant 1.  Rows of
    T are the new basis (a_1..a_g, b_1..b_g) written in the old one.
    """
    M = np.asarray(M, dtype=object)
    n = M.shape[0]
    if n % 2 or any(M[i, j] != -M[j, i] for i in range(n) for j in range(n)):
        raise InputError("skew-symmetric matrix of even size expected")

    def form(u, v):
        return int(sum(u[i] * M[i, j] * v[j] for i in range(n) for j in range(n) if M[i, j]))

    rest = [np.array([1 if j == i else 0 for j in range(n)], dtype=object) for i in range(n)]
    A, B = [], []
    while rest:
        e = rest.pop(0)
        while True:
            nz = [(abs(form(e, v)), i) for i, v in enumerate(rest) if form(e, v) != 0]
            if not nz:
                raise InputError("form is degenerate over the integers")
            _, i0 = min(nz)
            piv = rest[i0]
            pv = form(e, piv)
            done = True
            for i, v in enumerate(rest):
                if i == i0:
                    continue
                q = form(e, v) // pv
                if q:
                    rest[i] = v - q * piv
                if form(e, rest[i]) != 0:
                    done = False
            if done:
                break
        if abs(pv) != 1:
            raise InputError("form is not unimodular")
        f = rest.pop(i0) * pv  # pv = +-1 so that form(e, f) = 1
        rest = [v - form(v, f) * e + form(v, e) * f for v in rest]
        A.append(e)
        B.append(f)
    T = np.array(A + B, dtype=np.int64)
    return T


# ------------------------------------------------------------------ loops


@dataclass(frozen=True)
class LoopSystem:
    curve: CurveSpec
    p: SurfacePoint
    star: Star
    connector: XPath
    hub_sheet: int  # +1 if y at the hub (after the connector) is the principal root
    words: tuple
    loops: tuple
    intersection: np.ndarray = field(compare=False)
    swapped: bool = False
    q: SurfacePoint | None = None
    delta: SurfacePath | None = None

    @property
    def g(self) -> int:
        return self.curve.genus

    def word_path(self, word) -> XPath:
        xp = self.connector
        for k, e in word:
            lk = self.star.loop(self.curve, k)
            xp = xp + (lk if e == 1 else lk.reversed())
        return xp + self.connector.reversed()

    def flip_path(self) -> XPath:
        """Loop at p that ends on the other sheet (conjugate of l_1)."""
        return self.word_path([(1, 1)])


def _connector(curve: CurveSpec, star: Star, p: SurfacePoint, avoid=()) -> XPath:
    obstacles = star.obstacles(curve) + [(complex(a), 0.3 * star.score * curve.diameter) for a in avoid]
    return route(p.x, star.hub, obstacles)


def _word_period(word, E: np.ndarray, hub_sheet: int) -> np.ndarray:
    out = np.zeros(E.shape[1], dtype=complex)
    sheet = hub_sheet
    for k, _ in word:
        out += sheet * E[k - 1]
        sheet = -sheet
    return out


def build_homology_basis(
    curve: CurveSpec,
    p: SurfacePoint,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    q: SurfacePoint | None = None,
    avoid: Sequence = (),
    delta_radius: float | None = None,
) -> LoopSystem:
    """Canonical system of based loops at ``p`` (see module docstring)."""
    if p.at_infinity or p.branch:
        raise InputError("basepoint must be a finite non-branch point")
    g = curve.genus
    avoid = tuple(complex(a) for a in avoid)
    star = choose_star(curve, avoid)
    y_hub0, lsigs = star_loop_signatures(curve, star, cfg, 1)
    conn = _connector(curve, star, p, avoid)
    y_h = continue_y(curve, SurfacePath(conn, p.y), cfg).y_end
    hub_sheet = 1 if abs(y_h - y_hub0) < abs(y_h + y_hub0) else -1

    words = canonical_words(g)
    E = np.array([s.levels[0] for s in lsigs])
    per = np.array([_word_period(w, E, hub_sheet) for w in words]).T  # g x 2g
    Z = np.linalg.solve(per[:, :g], per[:, g:])
    Y = 0.5 * (Z + Z.T).imag
    ev = np.linalg.eigvalsh(Y)
    swapped = False
    if np.all(ev < 0):
        # [b_g, a_g] ... [b_1, a_1] = 1 as well, with the opposite orientation
        words = [words[g + g - 1 - k] for k in range(g)] + [words[g - 1 - k] for k in range(g)]
        swapped = True
    elif not np.all(ev > 0):
        raise NotPositive(f"Im Z is indefinite (eigenvalues {ev})")

    V = np.array([chain_coordinates(w, g) for w in words])
    M = V @ chain_intersection_matrix(g) @ V.T
    if not np.array_equal(M, standard_symplectic(g)):
        # the period orientation and the topological one must agree
        raise DegenerateConfiguration("loop words are not symplectic for the period orientation")

    loops = []
    for w in words:
        xp = conn
        for k, e in w:
            lk = star.loop(curve, k)
            xp = xp + (lk if e == 1 else lk.reversed())
        xp = xp + conn.reversed()
        loops.append(SurfacePath(xp, p.y, meta={"word": tuple(w)}))

    ls = LoopSystem(
        curve=curve,
        p=p,
        star=star,
        connector=conn,
        hub_sheet=hub_sheet,
        words=tuple(tuple(w) for w in words),
        loops=tuple(loops),
        intersection=M,
        swapped=swapped,
    )
    if q is not None:
        radius = delta_radius if delta_radius is not None else default_delta_radius(curve, p, q)
        ls = LoopSystem(**{**ls.__dict__, "q": q, "delta": puncture_loop(curve, p, q, radius, loops=ls, cfg=cfg)})
    return ls


def default_delta_radius(curve: CurveSpec, p: SurfacePoint, q: SurfacePoint) -> float:
    dq = min(abs(q.x - e) for e in curve.roots)
    return 0.125 * min(dq, abs(q.x - p.x))


def puncture_loop(
    curve: CurveSpec,
    p: SurfacePoint,
    q: SurfacePoint,
    radius: float,
    *,
    loops: LoopSystem | None = None,
    orientation: int = 1,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> SurfacePath:
    """Loop at p running to q's sheet, around q once, and back."""
    if q.at_infinity or q.branch:
        raise InputError("puncture must be a finite non-branch point")
    dq = min(abs(q.x - e) for e in curve.roots)
    if not (radius < dq / 4 and radius < abs(q.x - p.x) / 4):
        raise RadiusTooLarge(f"radius {radius} too large (limits {dq / 4}, {abs(q.x - p.x) / 4})")
    if loops is None:
        loops = build_homology_basis(curve, p, cfg)
    u = (p.x - q.x) / abs(p.x - q.x)
    tip = q.x + radius * u
    obstacles = loops.star.obstacles(curve)
    conn = route(p.x, tip, obstacles)
    y_tip = continue_y(curve, SurfacePath(conn, p.y), cfg).y_end
    s = np.sqrt(curve.f(tip))
    y_target = s if abs(s - q.y) < abs(s + q.y) else -s
    prefix = XPath((), p.x)
    if abs(y_tip - y_target) > abs(y_tip + y_target):
        prefix = loops.flip_path()
    th = cmath.phase(u)
    circle = XPath((Arc(q.x, radius, th, th + orientation * 2 * math.pi),), tip)
    xp = prefix + conn + circle + conn.reversed() + prefix.reversed()
    return SurfacePath(xp, p.y, meta={"radius": radius, "orientation": orientation})


# ------------------------------------------------------------------ relator


def relator_word(g: int) -> list:
    """gamma_1 gamma_{g+1} gamma_1^-1 gamma_{g+1}^-1 ... delta^-1 (indices 1-based)."""
    if g < 1:
        raise InputError("genus must be >= 1")
    w = []
    for nu in range(1, g + 1):
        w += [(nu, 1), (g + nu, 1), (nu, -1), (g + nu, -1)]
    w.append((DELTA, -1))
    return w


def concatenate_word(loops: LoopSystem, word) -> SurfacePath:
    """One closed path at p tracing the word in the based generators."""
    xp = XPath((), loops.p.x)
    for gen, e in word:
        if gen == DELTA:
            if loops.delta is None:
                raise InputError("loop system has no puncture loop")
            piece = loops.delta.xpath
        else:
            if not 1 <= gen <= 2 * loops.g:
                raise InputError(f"generator index {gen} out of range")
            piece = loops.loops[gen - 1].xpath
        xp = xp + (piece if e == 1 else piece.reversed())
    return SurfacePath(xp, loops.p.y)
