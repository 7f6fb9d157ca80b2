"""Periods, the normalized period matrix, lattice arithmetic and the Abel-Jacobi map."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chen import generator_signatures
from .curve import INFINITY, CurveSpec, Divisor, SurfacePoint, holomorphic_basis
from .errors import InputError, NotPositive, NotSymmetric, SingularABlock
from .geometry import Arc, SurfacePath, XPath, route
from .quadrature import (
    DEFAULT_CONFIG,
    QuadratureConfig,
    branch_obstacles,
    continue_y,
    integral_to_infinity,
    line_integrals,
)
from .serialize import cplx
from .topology import LoopSystem

COND_MAX = 1e8
SYM_TOL = 1e-8
A_TOL = 1e-10
LATTICE_TOL = 1e-6


@dataclass(frozen=True)
class PeriodData:
    """Raw periods ``P[k, nu]`` of x^k dx/y over gamma_nu and everything derived from them.

    Attributes
    ----------
    P : (g, 2g) complex array
    N : (g, g) complex array
        Normalization, ``dz = N @ omega`` with ``N = Omega1^{-1}``.
    Z : (g, g) complex array
        Normalized b-periods, symmetric with positive definite imaginary part.
    A : (g, g) complex array
        ``(conj(Z) - Z)^{-1}``.
    """

    P: np.ndarray
    N: np.ndarray
    Z: np.ndarray
    A: np.ndarray
    cond: float
    symmetry_residual: float
    a_residual: float

    @property
    def g(self) -> int:
        return self.Z.shape[0]

    @property
    def omega1(self) -> np.ndarray:
        return self.P[:, : self.g]

    @property
    def omega2(self) -> np.ndarray:
        return self.P[:, self.g :]

    @property
    def normalized(self) -> np.ndarray:
        """The g x 2g matrix (I, Z) of normalized periods."""
        return self.N @ self.P

    def to_json(self) -> dict:
        return {
            "Omega1": cplx(self.omega1),
            "Omega2": cplx(self.omega2),
            "Z": cplx(self.Z),
            "A": cplx(self.A),
            "cond_Omega1": self.cond,
            "symmetry_residual": self.symmetry_residual,
            "A_antihermitian_residual": self.a_residual,
        }


def period_data_from_raw(P: np.ndarray) -> PeriodData:
    """Normalize raw periods and assert the Riemann bilinear relations."""
    P = np.asarray(P, dtype=complex)
    g = P.shape[0]
    O1, O2 = P[:, :g], P[:, g:]
    cond = float(np.linalg.cond(O1))
    if not math.isfinite(cond) or cond > COND_MAX:
        raise SingularABlock(f"a-period block is ill-conditioned (cond = {cond:.3g})")
    N = np.linalg.inv(O1)
    Z = N @ O2
    zmax = float(np.max(np.abs(Z)))
    sym = float(np.max(np.abs(Z - Z.T))) / zmax
    if sym > SYM_TOL:
        raise NotSymmetric(f"Z is not symmetric (relative residual {sym:.3g})")
    Y = 0.5 * (Z + Z.T).imag
    try:
        np.linalg.cholesky(Y)
    except np.linalg.LinAlgError:
        raise NotPositive("Im Z is not positive definite") from None
    A = np.linalg.inv(Z.conj() - Z)
    ares = float(np.max(np.abs(A.T + A.conj()))) / float(np.max(np.abs(A)))
    return PeriodData(P, N, Z, A, cond, sym, ares)


def compute_periods(curve: CurveSpec, loops: LoopSystem, cfg: QuadratureConfig = DEFAULT_CONFIG) -> PeriodData:
    sigs = generator_signatures(curve, loops, cfg, depth=1)
    P = np.array([s.levels[0] for s in sigs]).T
    return period_data_from_raw(P)


def direct_periods(curve: CurveSpec, loops: LoopSystem, cfg: QuadratureConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Raw periods by integrating along each full loop (independent of the star cache)."""
    forms = holomorphic_basis(curve)
    return np.array([line_integrals(curve, forms, lp, cfg) for lp in loops.loops]).T


# ------------------------------------------------------------------ lattice


def lattice_matrix(Z: np.ndarray) -> np.ndarray:
    """Real 2g x 2g matrix whose columns are the lattice generators (I, Z) in (Re, Im) coordinates."""
    Z = np.asarray(Z, dtype=complex)
    g = Z.shape[0]
    B = np.zeros((2 * g, 2 * g))
    B[:g, :g] = np.eye(g)
    B[:g, g:] = Z.real
    B[g:, g:] = Z.imag
    return B


@dataclass(frozen=True)
class Reduction:
    coords: np.ndarray  # fractional parts folded into [-1/2, 1/2)
    integers: np.ndarray  # the lattice point rounded to
    residual: float

    def to_json(self) -> dict:
        return {
            "residual": self.residual,
            "lattice_coords": [int(n) for n in self.integers],
            "fractional_coords": [float(c) for c in self.coords],
        }


def reduce_mod_lattice(v, Z) -> Reduction:
    """Write ``v = (I, Z) t`` and split t into an integer vector and a folded remainder.

    The residual is the length of ``(I, Z) frac(t)``.
    """
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    Z = np.asarray(Z, dtype=complex)
    B = lattice_matrix(Z)
    t = np.linalg.solve(B, np.concatenate([v.real, v.imag]))
    n = np.floor(t + 0.5)
    frac = t - n
    g = Z.shape[0]
    w = frac[:g] + Z @ frac[g:]
    return Reduction(frac, n.astype(np.int64), float(np.linalg.norm(w)))


def is_zero_mod_lattice(v, Z, tol: float = LATTICE_TOL) -> tuple:
    red = reduce_mod_lattice(v, Z)
    return red.residual < tol, red.residual


@dataclass(frozen=True)
class JacobianPoint:
    """A vector of C^g read modulo the lattice (I, Z) Z^2g."""

    v: np.ndarray
    Z: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "v", np.atleast_1d(np.asarray(self.v, dtype=complex)))

    def _check(self, other: "JacobianPoint"):
        if other.Z is not self.Z and not np.allclose(other.Z, self.Z, rtol=0, atol=1e-12):
            raise InputError("points live on different Jacobians")

    def __add__(self, other):
        self._check(other)
        return JacobianPoint(self.v + other.v, self.Z)

    def __sub__(self, other):
        self._check(other)
        return JacobianPoint(self.v - other.v, self.Z)

    def __neg__(self):
        return JacobianPoint(-self.v, self.Z)

    def __rmul__(self, k):
        return JacobianPoint(k * self.v, self.Z)

    def reduce(self) -> Reduction:
        return reduce_mod_lattice(self.v, self.Z)

    def reduced(self) -> "JacobianPoint":
        """Representative with lattice coordinates in [0, 1)^2g."""
        B = lattice_matrix(self.Z)
        t = np.linalg.solve(B, np.concatenate([self.v.real, self.v.imag]))
        t = t - np.floor(t)
        g = self.Z.shape[0]
        return JacobianPoint(t[:g] + self.Z @ t[g:], self.Z)

    def residual_to(self, other: "JacobianPoint") -> float:
        return (self - other).reduce().residual

    def is_zero(self, tol: float = LATTICE_TOL) -> bool:
        return self.reduce().residual < tol

    def to_json(self) -> dict:
        return {"value": cplx(self.v)}


# ------------------------------------------------------------------ Abel-Jacobi


def path_to_point(curve: CurveSpec, loops: LoopSystem, pt: SurfacePoint, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """A recorded path from the basepoint to a finite non-branch point on the right sheet."""
    p = loops.p
    xp = route(p.x, pt.x, branch_obstacles(curve))
    y_end = continue_y(curve, SurfacePath(xp, p.y), cfg).y_end
    if abs(y_end - pt.y) > abs(y_end + pt.y):
        xp = loops.flip_path() + xp
    return SurfacePath(xp, p.y)


def _integral_to_branch(curve: CurveSpec, loops: LoopSystem, e: complex, forms, cfg) -> np.ndarray:
    # going to e and back on the other sheet is homotopic (ends fixed) to
    # running out, circling e once and running back, so half of that loop
    # integral is the integral up to e
    p = loops.p
    dists = sorted(abs(e - r) for r in curve.roots)
    rho = 0.25 * min(dists[1], abs(e - p.x))
    obstacles = [(c, r) for c, r in branch_obstacles(curve) if abs(c - e) > 1e-12 * (1 + abs(e))]
    xp = route(p.x, e, obstacles)
    last = xp.segments[-1]
    u = (last.end - last.start) / abs(last.end - last.start)
    tip = e - rho * u
    xp = route(p.x, tip, obstacles)
    th = np.angle(tip - e)
    circle = XPath((Arc(e, rho, th, th + 2 * math.pi),), tip)
    loop = xp + circle + xp.reversed()
    return 0.5 * line_integrals(curve, forms, SurfacePath(loop, p.y), cfg)


def integral_from_basepoint(
    curve: CurveSpec, loops: LoopSystem, pt: SurfacePoint, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> np.ndarray:
    """``int_p^pt omega_k`` (unnormalized) along the recorded path."""
    forms = holomorphic_basis(curve)
    if pt.at_infinity:
        return integral_to_infinity(curve, forms, loops.p, cfg)
    if pt.branch:
        return _integral_to_branch(curve, loops, pt.x, forms, cfg)
    return line_integrals(curve, forms, path_to_point(curve, loops, pt, cfg), cfg)


def abel_jacobi(
    curve: CurveSpec,
    periods: PeriodData,
    loops: LoopSystem,
    D: Divisor,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> JacobianPoint:
    """``u(D) = sum m_P int_p^P dz`` for a degree-zero divisor."""
    if D.degree != 0:
        raise InputError(f"divisor has degree {D.degree}, expected 0")
    total = np.zeros(curve.genus, dtype=complex)
    for pt, m in D.items():
        if m == 0 or pt == loops.p:
            continue
        total += m * integral_from_basepoint(curve, loops, pt, cfg)
    return JacobianPoint(periods.N @ total, periods.Z)


def abel_jacobi_point(
    curve: CurveSpec,
    periods: PeriodData,
    loops: LoopSystem,
    pt: SurfacePoint,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> JacobianPoint:
    """``u(pt - p)``."""
    return abel_jacobi(curve, periods, loops, Divisor({pt: 1, loops.p: -1}), cfg)


__all__ = [
    "INFINITY",
    "JacobianPoint",
    "PeriodData",
    "Reduction",
    "abel_jacobi",
    "abel_jacobi_point",
    "compute_periods",
    "direct_periods",
    "integral_from_basepoint",
    "is_zero_mod_lattice",
    "lattice_matrix",
    "period_data_from_raw",
    "reduce_mod_lattice",
]
