"""Seeded random curves and points for trial-based checks."""
from __future__ import annotations

import numpy as np

from .curve import CurveSpec, SurfacePoint, make_curve
from .errors import InputError


def random_curve(genus: int, rng: np.random.Generator, *, min_separation: float = 0.4) -> CurveSpec:
    """Monic odd-degree curve with random roots, kept apart by ``min_separation``."""
    if genus < 1:
        raise InputError("genus must be >= 1")
    d = 2 * genus + 1
    for _ in range(1000):
        roots = rng.normal(size=d) + 1j * rng.normal(size=d)
        sep = min(abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1 :])
        if sep > min_separation:
            coeffs = np.poly(roots)[::-1]
            # round to 12 digits so the decimal echo is exact and short
            return make_curve([complex(round(c.real, 12), round(c.imag, 12)) for c in coeffs])
    raise RuntimeError("could not draw a well-separated root set")


def random_points(
    curve: CurveSpec,
    rng: np.random.Generator,
    count: int,
    *,
    avoid=(),
    margin: float = 0.08,
) -> list:
    """Finite points at distance >= ``margin * diameter`` from branch points and ``avoid``."""
    D = curve.diameter
    c0 = np.mean(curve.roots)
    blocked = list(curve.roots) + [complex(a) for a in avoid]
    out: list = []
    while len(out) < count:
        x = complex(c0 + 0.6 * D * (rng.normal() + 1j * rng.normal()))
        if min(abs(x - b) for b in blocked + [pt.x for pt in out]) < margin * D:
            continue
        y = complex(np.sqrt(curve.f(x)))
        if rng.random() < 0.5:
            y = -y
        out.append(curve.point(x, y))
    return out


def point_from_values(curve: CurveSpec, vals) -> SurfacePoint:
    """``[x_re, x_im]`` (principal y) or ``[x_re, x_im, y_re, y_im]``."""
    vals = [float(v) for v in vals]
    if len(vals) == 2:
        return curve.point(complex(vals[0], vals[1]))
    if len(vals) == 4:
        return curve.point(complex(vals[0], vals[1]), complex(vals[2], vals[3]))
    raise InputError("a point needs 2 or 4 real numbers")
