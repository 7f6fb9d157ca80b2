"""JSON helpers: complex numbers as ``[re, im]``, floats at full precision."""
from __future__ import annotations

import json

import numpy as np


def cplx(a):
    """Nested lists with every complex entry written as ``[re, im]``."""
    a = np.asarray(a)
    if a.ndim == 0:
        z = complex(a)
        return [z.real, z.imag]
    return [cplx(x) for x in a]


def real(a):
    a = np.asarray(a)
    if a.ndim == 0:
        return float(a) if a.dtype.kind == "f" else int(a)
    return [real(x) for x in a]


def dumps(obj) -> str:
    # json writes floats with repr, which round-trips doubles exactly
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True)
