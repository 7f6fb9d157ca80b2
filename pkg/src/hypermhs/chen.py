"""Iterated integrals of length <= 3 and Chen's calculus on them.

Two split rules are used and kept apart by name:

* :func:`concatenation_value` is the rule for *paths*,
  ``int_{ab} w = sum_k int_a w[:k] int_b w[k:]`` with empty parts allowed.
* :func:`eval_on_monomial` is the rule for products of augmentation-ideal
  elements ``(gamma_1 - 1)(gamma_2 - 1)...`` where every factor must
  receive at least one letter, because positive-length integrals vanish on
  the identity.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Mapping, Sequence

import numpy as np

from .curve import CurveSpec, Differential, holomorphic_basis
from .errors import InputError
from .geometry import SurfacePath
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, path_signature
from .signature import Signature
from .topology import DELTA, LoopSystem, star_loop_signatures

Values = Callable[[tuple], complex]


def _as_values(v) -> Values:
    if isinstance(v, Signature):
        return v.word
    return v


def iterated_integral(
    curve: CurveSpec,
    word: Sequence[Differential],
    path: SurfacePath,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> complex:
    """``int_path phi_1 ... phi_n`` for the letters in ``word`` (first integrated first)."""
    word = list(word)
    if not word:
        return 1.0 + 0j
    if len(word) > 3:
        raise InputError("words longer than 3 are not supported")
    letters: list = []
    idx = []
    for phi in word:
        for k, known in enumerate(letters):
            if known is phi:
                idx.append(k)
                break
        else:
            letters.append(phi)
            idx.append(len(letters) - 1)
    sig, _ = path_signature(curve, letters, path, cfg, depth=len(word))
    return sig.word(tuple(idx))


def concatenation_value(values_a, values_b, word: tuple) -> complex:
    """Value of ``word`` on the path a followed by b (path split rule)."""
    a, b = _as_values(values_a), _as_values(values_b)
    word = tuple(word)
    return sum(a(word[:k]) * b(word[k:]) for k in range(len(word) + 1))


def reversal_value(values_a, word: tuple) -> complex:
    """Value of ``word`` on the reversed path: ``(-1)^n`` times the reversed word."""
    a = _as_values(values_a)
    word = tuple(word)
    return (-1) ** len(word) * a(word[::-1])


def compositions(n: int, parts: int):
    """Ways to cut ``range(n)`` into ``parts`` consecutive non-empty blocks."""
    for cuts in combinations(range(1, n), parts - 1):
        bounds = (0,) + cuts + (n,)
        yield [(bounds[i], bounds[i + 1]) for i in range(parts)]


def eval_on_monomial(tables: Mapping, monomial: Sequence, word: tuple) -> complex:
    """Value of ``word`` on ``(gamma_{i_1} - 1)...(gamma_{i_k} - 1)``.

    ``tables`` maps a generator key to its iterated-integral values (a
    :class:`Signature` or a callable on letter tuples).
    """
    word = tuple(word)
    k = len(monomial)
    if k == 0:
        raise InputError("empty monomial")
    vals = [_as_values(tables[i]) for i in monomial]
    total = 0j
    for blocks in compositions(len(word), k):
        term = 1.0 + 0j
        for v, (lo, hi) in zip(vals, blocks):
            term *= v(word[lo:hi])
        total += term
    return total


def eval_on_element(tables: Mapping, element, word: tuple) -> complex:
    """Linear extension to ``sum coeff * monomial`` given as ``[(coeff, monomial), ...]``."""
    return sum(c * eval_on_monomial(tables, mono, word) for c, mono in element)


# ------------------------------------------------------------ generator tables


def _loop_letter_signature(lsigs, k: int, e: int, sheet: int) -> Signature:
    """Signature of l_k^e entered on ``sheet`` (relative to the principal hub root)."""
    if e == 1:
        s = lsigs[k - 1]
        return s if sheet == 1 else s.sheet_flip()
    s = lsigs[k - 1]
    s = s if -sheet == 1 else s.sheet_flip()
    return s.inverse()


def generator_signatures(
    curve: CurveSpec,
    loops: LoopSystem,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    N: np.ndarray | None = None,
    depth: int = 3,
) -> list:
    """Signatures of gamma_1..gamma_2g for the holomorphic basis.

    Assembled from the cached star-loop signatures and one connector, and
    transformed to the letters ``N @ omega`` when ``N`` is given.
    """
    forms = holomorphic_basis(curve)
    _, lsigs = star_loop_signatures(curve, loops.star, cfg, depth)
    conn, _ = path_signature(curve, forms, SurfacePath(loops.connector, loops.p.y), cfg, depth)
    conn_inv = conn.inverse()
    out = []
    for word in loops.words:
        sig = conn
        sheet = loops.hub_sheet
        for k, e in word:
            sig = sig * _loop_letter_signature(lsigs, k, e, sheet)
            sheet = -sheet
        sig = sig * conn_inv
        out.append(sig.transform(N) if N is not None else sig)
    return out


def generator_tables(
    curve: CurveSpec,
    loops: LoopSystem,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    N: np.ndarray | None = None,
    depth: int = 3,
) -> dict:
    """``{1..2g: Signature}`` plus ``DELTA`` when the loop system has a puncture loop."""
    sigs = generator_signatures(curve, loops, cfg, N, depth)
    tables = {i + 1: s for i, s in enumerate(sigs)}
    if loops.delta is not None:
        d, _ = path_signature(curve, holomorphic_basis(curve), loops.delta, cfg, depth)
        tables[DELTA] = d.transform(N) if N is not None else d
    return tables


@dataclass(frozen=True)
class IterMatrices:
    """``I1[i][nu, j] = int_{gamma_nu} dz_i dz_j`` and ``I2`` likewise over gamma_{g+nu}."""

    I1: np.ndarray  # shape (g, g, g)
    I2: np.ndarray

    @property
    def g(self) -> int:
        return self.I1.shape[0]

    def to_json(self) -> dict:
        from .serialize import cplx

        return {"I1": cplx(self.I1), "I2": cplx(self.I2)}


def iter_matrices_from_signatures(sigs: Sequence[Signature]) -> IterMatrices:
    g = len(sigs) // 2
    I1 = np.empty((g, g, g), dtype=complex)
    I2 = np.empty((g, g, g), dtype=complex)
    for nu in range(g):
        for i in range(g):
            I1[i, nu, :] = sigs[nu].levels[1][i, :]
            I2[i, nu, :] = sigs[g + nu].levels[1][i, :]
    return IterMatrices(I1, I2)


def compute_iter_matrices(
    curve: CurveSpec,
    loops: LoopSystem,
    N: np.ndarray,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> IterMatrices:
    """All length-2 integrals of the normalized basis over the based loops."""
    return iter_matrices_from_signatures(generator_signatures(curve, loops, cfg, N, depth=2))
