"""Truncated path signatures: all iterated integrals of length <= 3.

A :class:`Signature` over ``m`` letters stores the level-n tensors
``levels[n-1][a1, ..., an] = int phi_a1 ... phi_an`` (first letter
integrated first).  Multiplication is path concatenation.
"""
from __future__ import annotations

import numpy as np

from . import _kernels


class Signature:
    __slots__ = ("levels",)

    def __init__(self, levels):
        self.levels = [np.asarray(L, dtype=complex) for L in levels]

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def m(self) -> int:
        return self.levels[0].shape[0]

    @classmethod
    def identity(cls, m: int, depth: int = 3) -> "Signature":
        return cls([np.zeros((m,) * n, dtype=complex) for n in range(1, depth + 1)])

    def __mul__(self, other: "Signature") -> "Signature":
        depth = min(self.depth, other.depth)
        return Signature(_kernels.backend.chen_product(self.levels, other.levels, depth))

    def inverse(self) -> "Signature":
        """Signature of the reversed path: (-1)^n times the reversed word."""
        out = []
        for n, L in enumerate(self.levels, start=1):
            out.append((-1) ** n * np.transpose(L, tuple(range(n - 1, -1, -1))))
        return Signature(out)

    def sheet_flip(self) -> "Signature":
        """Same path on the other sheet, for letters odd under y -> -y."""
        return Signature([(-1) ** n * L for n, L in enumerate(self.levels, start=1)])

    def transform(self, N: np.ndarray) -> "Signature":
        """Change of letters phi'_i = sum_k N[i, k] phi_k."""
        N = np.asarray(N, dtype=complex)
        out = [N @ self.levels[0]]
        if self.depth >= 2:
            out.append(np.einsum("ia,jb,ab->ij", N, N, self.levels[1]))
        if self.depth >= 3:
            out.append(np.einsum("ia,jb,kc,abc->ijk", N, N, N, self.levels[2]))
        return Signature(out)

    def truncate(self, depth: int) -> "Signature":
        return Signature(self.levels[:depth])

    def word(self, idx) -> complex:
        """Value on a word given as a tuple of letter indices."""
        if len(idx) == 0:
            return 1.0 + 0j
        return complex(self.levels[len(idx) - 1][tuple(idx)])

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(L))) if L.size else 0.0 for L in self.levels)

    def __sub__(self, other: "Signature") -> "Signature":
        return Signature([a - b for a, b in zip(self.levels, other.levels)])

    def __repr__(self):
        return f"Signature(m={self.m}, depth={self.depth})"


def power(sig: Signature, k: int) -> Signature:
    if k < 0:
        return power(sig.inverse(), -k)
    out = Signature.identity(sig.m, sig.depth)
    for _ in range(k):
        out = out * sig
    return out
