"""The extension class image and the verification of the theorem chain around it."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .abelian import (
    LATTICE_TOL,
    JacobianPoint,
    PeriodData,
    abel_jacobi,
    abel_jacobi_point,
    compute_periods,
    reduce_mod_lattice,
)
from .chen import IterMatrices, eval_on_element, generator_tables
from .curve import CurveSpec, Divisor, SurfacePoint, canonical_divisor, holomorphic_basis, third_kind
from .errors import InputError, LengthMismatch
from .geometry import Arc, SurfacePath, XPath
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, line_integral, line_integrals, path_signature
from .serialize import cplx
from .theta import riemann_constant
from .topology import DELTA, LoopSystem, build_homology_basis, concatenate_word, relator_word

CHEN_TOL = 1e-7


@dataclass(frozen=True)
class ExtensionClassImage:
    """Images ``v_pp`` of k_pp and ``v_pq`` of k_pq in the Jacobian."""

    v_pp: JacobianPoint
    v_pq: JacobianPoint

    def to_json(self) -> dict:
        return {"v_pp": cplx(self.v_pp.v), "v_pq": cplx(self.v_pq.v)}


def extension_class(periods: PeriodData, iters: IterMatrices, u_qp: JacobianPoint, g: int) -> ExtensionClassImage:
    """``v_pp = diag Z - 2 tr I1`` and ``v_pq = v_pp + 2g u(q - p)``."""
    if periods.g != g or iters.g != g:
        raise InputError("genus mismatch between inputs")
    tr = np.trace(iters.I1, axis1=1, axis2=2)
    v_pp = JacobianPoint(np.diag(periods.Z) - 2 * tr, periods.Z)
    return ExtensionClassImage(v_pp, v_pp + (2 * g) * u_qp)


def pi_pairing(F, G) -> complex:
    """``sum_nu F(gamma_nu) G(gamma_{g+nu}) - F(gamma_{g+nu}) G(gamma_nu)``."""
    F = np.asarray(F, dtype=complex)
    G = np.asarray(G, dtype=complex)
    if F.shape != G.shape or F.ndim != 1 or F.size % 2:
        raise LengthMismatch(f"pairing needs two sequences of equal even length, got {F.shape} and {G.shape}")
    g = F.size // 2
    return complex(np.sum(F[:g] * G[g:] - F[g:] * G[:g]))


def period_relation_matrix(periods: PeriodData) -> np.ndarray:
    """``Pi(int dz_i; int dz_j)`` for all i, j."""
    W = periods.normalized
    g = periods.g
    return np.array([[pi_pairing(W[i], W[j]) for j in range(g)] for i in range(g)])


def higher_period_vector(periods: PeriodData, iters: IterMatrices) -> np.ndarray:
    """The g-vector whose vanishing modulo the lattice is the higher period relation."""
    Z, A = periods.Z, periods.A
    g = periods.g
    tr = np.array([2 * np.trace(iters.I2[i] @ A) - 2 * np.trace(iters.I1[i] @ A @ Z) for i in range(g)])
    return (
        tr
        + (np.diag(Z @ A @ Z) - Z @ np.diag(A @ Z))
        + (np.diag(Z @ A) - Z @ np.diag(A))
        + (np.diag(A @ Z) - Z @ np.diag(Z @ A))
    )


def _fragment(name, inputs, reductions, passed, **extra) -> dict:
    out = {
        "name": name,
        "inputs": inputs,
        "residuals": [r.residual for r in reductions],
        "lattice_coords": [[int(n) for n in r.integers] for r in reductions],
        "pass": bool(passed),
    }
    out.update(extra)
    return out


def verify_higher_period_relation(periods: PeriodData, iters: IterMatrices, *, tol: float = LATTICE_TOL) -> dict:
    v = higher_period_vector(periods, iters)
    red = reduce_mod_lattice(v, periods.Z)
    return _fragment("higher_period_relation", {"tol": tol}, [red], red.residual < tol, value=cplx(v))


# ------------------------------------------------------------------ group ring


def commutator_expansion(g: int) -> list:
    """The cubic truncation of the relator in the ring, as ``[(coeff, monomial), ...]``.

    Monomials are tuples of generator indices standing for products of
    ``c_i = gamma_i - 1``.
    """
    out = []
    for nu in range(1, g + 1):
        a, b = nu, g + nu
        out += [
            (1, (a, b)),
            (-1, (b, a)),
            (1, (b, a, b)),
            (-1, (a, b, a)),
            (-1, (a, b, b)),
            (1, (b, a, a)),
        ]
    return out


def expand_product(factors, depth: int = 3) -> dict:
    """Expand a product of group elements ``1 + c_i`` and inverses in the ring, mod J^(depth+1).

    ``factors`` is a sequence of ``(index, exponent)``; ``(1 + c)^{-1}``
    is ``1 - c + c^2 - c^3 + ...``.  Returns ``{monomial: coeff}`` without
    the constant term.
    """
    poly = {(): 1}
    for idx, e in factors:
        if e == 1:
            f = {(): 1, (idx,): 1}
        else:
            f = {(idx,) * k: (-1) ** k for k in range(depth + 1)}
        new: dict = {}
        for m1, c1 in poly.items():
            for m2, c2 in f.items():
                m = m1 + m2
                if len(m) <= depth:
                    new[m] = new.get(m, 0) + c1 * c2
        poly = {m: c for m, c in new.items() if c}
    poly.pop((), None)
    return poly


def homotopy_functionals(periods: PeriodData) -> list:
    """Functionals used for the group-ring check: ``[(label, [(coeff, word), ...]), ...]``.

    Every ``int dz_a dz_b`` and, for each i, ``sum_jk a_jk int dz_j dz_i dz_k``.
    """
    g = periods.g
    out = []
    for a, b in itertools.product(range(g), repeat=2):
        out.append((f"dz{a + 1}dz{b + 1}", [(1.0, (a, b))]))
    for i in range(g):
        terms = [(periods.A[j, k], (j, i, k)) for j in range(g) for k in range(g)]
        out.append((f"A-triple[{i + 1}]", terms))
    for a in range(g):
        out.append((f"dz{a + 1}", [(1.0, (a,))]))
    return out


def _functional_on_tables(tables, element, terms) -> complex:
    return sum(c * eval_on_element(tables, element, w) for c, w in terms)


def _functional_on_signature(sig, terms) -> complex:
    return sum(c * sig.word(w) for c, w in terms)


def verify_group_ring_relation(
    curve: CurveSpec,
    loops: LoopSystem,
    periods: PeriodData,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    tol: float = CHEN_TOL,
) -> dict:
    """Evaluate homotopy functionals on the cubic relator expansion, on ``delta - 1`` and on the relator path."""
    if loops.delta is None:
        raise InputError("loop system needs a puncture loop")
    g = curve.genus
    tables = generator_tables(curve, loops, cfg, periods.N, depth=3)
    lhs_elem = commutator_expansion(g)
    rel = relator_word(g)
    full_expansion = [(c, m) for m, c in expand_product(rel[:-1]).items()]
    relator_path = concatenate_word(loops, rel)
    forms = holomorphic_basis(curve)
    rsig, _ = path_signature(curve, forms, relator_path, cfg, depth=3)
    rsig = rsig.transform(periods.N)
    dsig = tables[DELTA]
    rows = []
    worst_lhs = worst_rel = worst_exp = term_scale = 0.0
    for label, terms in homotopy_functionals(periods):
        lhs = _functional_on_tables(tables, lhs_elem, terms)
        for coeff, mono in lhs_elem:
            term_scale = max(term_scale, abs(_functional_on_tables(tables, [(coeff, mono)], terms)))
        exp_val = _functional_on_tables(tables, full_expansion, terms)
        d_val = _functional_on_signature(dsig, terms)
        r_val = _functional_on_signature(rsig, terms)
        worst_lhs = max(worst_lhs, abs(lhs - d_val))
        worst_exp = max(worst_exp, abs(exp_val - d_val))
        worst_rel = max(worst_rel, abs(r_val))
        rows.append(
            {
                "functional": label,
                "lhs": cplx(lhs),
                "expanded_product": cplx(exp_val),
                "on_delta": cplx(d_val),
                "on_relator": cplx(r_val),
            }
        )
    # all length <= 3 words on the relator path
    all_words = max(
        abs(rsig.word(w))
        for n in (1, 2, 3)
        for w in itertools.product(range(g), repeat=n)
    )
    passed = max(worst_lhs, worst_rel, all_words) < tol
    return {
        "name": "group_ring_relation",
        "inputs": {"tol": tol, "delta_radius": loops.delta.meta.get("radius")},
        "residuals": [worst_lhs, worst_rel, all_words],
        "expansion_residual": worst_exp,
        "largest_single_term": term_scale,
        "functionals": rows,
        "pass": bool(passed),
    }


# ------------------------------------------------------------------ main theorem


def verify_main_theorem(
    curve: CurveSpec,
    periods: PeriodData,
    loops: LoopSystem,
    iters: IterMatrices,
    q: SurfacePoint,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    kappa: JacobianPoint | None = None,
    tol: float = LATTICE_TOL,
) -> dict:
    """Three-way agreement of ``v_pq``, ``u(2g q - 2p - K)`` and ``2 kappa_p + 2g u(q - p)``."""
    g = curve.genus
    p = loops.p
    K = canonical_divisor(curve)
    if kappa is None:
        kappa = riemann_constant(periods, iters)
    u_qp = abel_jacobi_point(curve, periods, loops, q, cfg) if q != p else JacobianPoint(np.zeros(g), periods.Z)
    ext = extension_class(periods, iters, u_qp, g)
    a = ext.v_pq
    b = abel_jacobi(curve, periods, loops, Divisor({q: 2 * g}) + Divisor({p: -2}) - K, cfg)
    c = 2 * kappa + (2 * g) * u_qp
    reds = [(a - b).reduce(), (a - c).reduce(), (b - c).reduce()]
    passed = all(r.residual < tol for r in reds)
    return _fragment(
        "main_theorem",
        {"p": cplx([p.x, p.y]), "q": cplx([q.x, q.y]), "tol": tol},
        reds,
        passed,
        pairs=["extension-vs-divisor", "extension-vs-kappa", "divisor-vs-kappa"],
        extension=ext.to_json(),
    )


# ------------------------------------------------------------------ reciprocity


def residue_check(curve: CurveSpec, q: SurfacePoint, q2: SurfacePoint, radius: float = 1e-3,
                  cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Integral of the third-kind form over a small positive circle around q, on q's sheet."""
    eta = third_kind(q, q2)
    circle = XPath((Arc(q.x, radius, 0.0, 2 * np.pi),), q.x + radius)
    s = np.sqrt(curve.f(q.x + radius))
    y0 = s if abs(s - q.y) < abs(s + q.y) else -s
    return line_integral(curve, eta, SurfacePath(circle, y0), cfg)


def verify_third_kind_reciprocity(
    curve: CurveSpec,
    p: SurfacePoint,
    q: SurfacePoint,
    q2: SurfacePoint,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    tol: float = LATTICE_TOL,
    residue_tol: float = 0.02,
) -> dict:
    """Check ``Pi(int dz_i; int eta_{q,q2}) = u(q - q2)`` modulo the lattice.

    The loop system is rebuilt so that its loops keep clear of q and q2.
    """
    if q == q2:
        raise InputError("q and q2 must differ")
    loops = build_homology_basis(curve, p, cfg, avoid=(q.x, q2.x))
    periods = compute_periods(curve, loops, cfg)
    eta = third_kind(q, q2)
    G = np.array([line_integral(curve, eta, lp, cfg) for lp in loops.loops])
    W = periods.normalized
    lhs = np.array([pi_pairing(W[i], G) for i in range(curve.genus)])
    u = abel_jacobi(curve, periods, loops, Divisor({q: 1, q2: -1}), cfg)
    red = reduce_mod_lattice(lhs - u.v, periods.Z)
    res = residue_check(curve, q, q2, cfg=cfg)
    res_ok = abs(res - 1) < residue_tol
    return _fragment(
        "third_kind_reciprocity",
        {"q": cplx([q.x, q.y]), "q2": cplx([q2.x, q2.y]), "tol": tol},
        [red],
        red.residual < tol and res_ok,
        pairing=cplx(lhs),
        abel_jacobi=cplx(u.v),
        residue_integral=cplx(res),
    )
