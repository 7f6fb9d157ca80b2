"""NumPy implementations of the quadrature kernels.

Reference backend; ``_ckernels`` mirrors these signatures exactly.
"""
import numpy as np

NAME = "python"

# |Re(y_i conj y_{i-1})| must exceed this fraction of |y_i||y_{i-1}|:
# consecutive samples of y may turn by at most pi/4.
TRACK_COS = np.cos(np.pi / 4)


def track_sqrt(s, y0):
    """Continue a square root along samples.

    ``s`` holds principal square roots at consecutive samples, ``y0`` the
    value just before the first sample.  Returns ``(y, ok)`` where ``y``
    picks the sign nearest to the previous sample and ``ok`` is False when
    some step turned by pi/4 or more.
    """
    s = np.asarray(s, dtype=complex)
    prev = np.empty_like(s)
    prev[0] = y0
    prev[1:] = s[:-1]
    d = (s * prev.conj()).real
    sign = np.where(d < 0, -1.0, 1.0)
    sign = np.cumprod(sign)
    ok = bool(np.all(np.abs(d) >= TRACK_COS * np.abs(s) * np.abs(prev)) and np.all(s != 0))
    return sign * s, ok


def segment_signature(vals, h, Q, w, level):
    """Iterated integrals of length <= level over one quadrature panel.

    ``vals[i, a]`` is the pullback of letter ``a`` at node ``i``; ``Q`` is
    the spectral integration matrix and ``w`` the weights on [-1, 1], ``h``
    the half-length of the panel.
    """
    f = np.asarray(vals, dtype=complex)
    hw = h * w
    out = [hw @ f]
    if level >= 2:
        F1 = h * (Q @ f)
        out.append(np.einsum("i,ia,ib->ab", hw, F1, f))
        if level >= 3:
            P2 = F1[:, :, None] * f[:, None, :]
            n, m = f.shape
            F2 = h * (Q @ P2.reshape(n, m * m)).reshape(n, m, m)
            out.append(np.einsum("i,iab,ic->abc", hw, F2, f))
    return out


def chen_product(A, B, level):
    """Truncated tensor-algebra product of two group-like elements."""
    out = [A[0] + B[0]]
    if level >= 2:
        out.append(A[1] + np.multiply.outer(A[0], B[0]) + B[1])
        if level >= 3:
            out.append(
                A[2]
                + np.multiply.outer(A[1], B[0])
                + np.multiply.outer(A[0], B[1])
                + B[2]
            )
    return out
