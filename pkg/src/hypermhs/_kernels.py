"""Kernel backend selection.

The compiled backend is used when the extension was built; set
``HYPERMHS_KERNELS=python`` to force the NumPy fallback.
"""
import os
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre

from . import _pykernels

_requested = os.environ.get("HYPERMHS_KERNELS", "auto").lower()

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

if _requested == "python" or _ckernels is None:
    backend = _pykernels
else:
    backend = _ckernels

BACKEND = backend.NAME


def available():
    out = {"python": _pykernels}
    if _ckernels is not None:
        out["cython"] = _ckernels
    return out


@lru_cache(maxsize=None)
def gauss_rule(n: int):
    """Gauss-Legendre nodes, weights and spectral integration matrix on [-1, 1].

    ``Q[i, j]`` integrates the j-th Lagrange basis polynomial from -1 to
    node i, so ``Q @ f`` is the indefinite integral of the interpolant.
    """
    x, w = legendre.leggauss(n)
    V = legendre.legvander(x, n - 1)
    k = np.arange(n)
    # discrete orthogonality gives the inverse Vandermonde exactly
    Vinv = ((2 * k + 1) / 2.0)[:, None] * V.T * w[None, :]
    # antiderivatives of P_k vanishing at -1
    pad = legendre.legvander(x, n)
    I = np.empty((n, n))
    I[:, 0] = x + 1.0
    for kk in range(1, n):
        I[:, kk] = (pad[:, kk + 1] - pad[:, kk - 1]) / (2 * kk + 1)
    Q = I @ Vinv
    x.setflags(write=False)
    w.setflags(write=False)
    Q.setflags(write=False)
    return x, w, Q
