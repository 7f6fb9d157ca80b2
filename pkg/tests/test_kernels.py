import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from hypermhs import _kernels, _pykernels
from hypermhs.signature import Signature, power


def _rand_levels(rng, m, scale=1.0):
    return [scale * (rng.normal(size=(m,) * n) + 1j * rng.normal(size=(m,) * n)) for n in (1, 2, 3)]


def test_gauss_rule_integrates_polynomials():
    x, w, Q = _kernels.gauss_rule(16)
    assert abs(w.sum() - 2) < 1e-14
    # Q integrates x^5 from -1
    assert np.allclose(Q @ x**5, (x**6 - 1) / 6, atol=1e-13)


def test_backends_agree_on_chen_product(rng):
    py = _pykernels
    for name, mod in _kernels.available().items():
        A, B = _rand_levels(rng, 3), _rand_levels(rng, 3)
        for a, b in zip(mod.chen_product(A, B, 3), py.chen_product(A, B, 3)):
            assert np.allclose(a, b, rtol=0, atol=1e-13), name


def test_backends_agree_on_segment_signature(rng, kernel):
    x, w, Q = _kernels.gauss_rule(12)
    vals = rng.normal(size=(12, 2)) + 1j * rng.normal(size=(12, 2))
    ref = _pykernels.segment_signature(vals, 0.3, Q, w, 3)
    got = kernel.segment_signature(vals, 0.3, Q, w, 3)
    for a, b in zip(got, ref):
        assert np.allclose(a, b, rtol=0, atol=1e-13)


def test_segment_signature_polynomial_path(kernel):
    # letters f_a(t) = 1 and t on [0, 1]: int dt dt = 1/2, int 1 then t = 1/3, triple 1,1,1 = 1/6
    x, w, Q = _kernels.gauss_rule(8)
    t = 0.5 * (x + 1)
    vals = np.stack([np.ones_like(t), t], axis=1).astype(complex)
    S = kernel.segment_signature(vals, 0.5, Q, w, 3)
    assert abs(S[1][0, 0] - 0.5) < 1e-14
    assert abs(S[1][0, 1] - 1 / 3) < 1e-14
    assert abs(S[1][1, 0] - 1 / 6) < 1e-14
    assert abs(S[2][0, 0, 0] - 1 / 6) < 1e-14


def test_track_sqrt(kernel):
    th = np.linspace(0, 2 * np.pi, 200)
    x = np.exp(1j * th)
    y, ok = kernel.track_sqrt(np.sqrt(x), 1.0 + 0j)
    assert ok
    assert abs(y[-1] + 1) < 1e-12
    _, ok = kernel.track_sqrt(np.array([1.0, 1j]), 1.0 + 0j)
    assert not ok


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_signature_group_laws(seed):
    rng = np.random.default_rng(seed)
    # group-like elements: exponentials of level-one data concatenated
    def grouplike():
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        return Signature([v, np.outer(v, v) / 2, np.einsum("a,b,c->abc", v, v, v) / 6])

    a, b, c = grouplike() * grouplike(), grouplike(), grouplike()
    assert ((a * b) * c - a * (b * c)).max_abs() < 1e-12
    assert (a * a.inverse()).max_abs() < 1e-12
    assert (power(a, 2) * power(a, -2)).max_abs() < 1e-12
    flip = (a * b).sheet_flip() - a.sheet_flip() * b.sheet_flip()
    assert flip.max_abs() < 1e-12
    N = rng.normal(size=(2, 2))
    assert ((a * b).transform(N) - a.transform(N) * b.transform(N)).max_abs() < 1e-12
