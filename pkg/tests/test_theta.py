import numpy as np
import pytest

from oracles import theta_g1
from hypermhs.abelian import JacobianPoint, abel_jacobi_point, compute_periods
from hypermhs.chen import compute_iter_matrices
from hypermhs.errors import InputError, NotPositiveDefinite
from hypermhs.sampling import random_points
from hypermhs.theta import (
    ThetaConfig,
    riemann_constant,
    riemann_constant_from_traces,
    theta,
    theta_norm,
    verify_kappa_canonical,
    verify_riemann_vanishing,
)
from hypermhs.topology import build_homology_basis


def test_theta_g1_oracle():
    assert abs(theta([0], [[1j]]) - 1.0864348112133080) < 1e-12
    z = 0.3 + 0.2j
    tau = 0.4 + 1.3j
    assert abs(theta([z], [[tau]]) - theta_g1(z, tau)) < 1e-12


def test_theta_symmetries(g2, rng):
    Z = g2[4].Z
    for _ in range(5):
        z = rng.normal(size=2) + 1j * rng.normal(size=2) * 0.3
        assert abs(theta(z, Z) - theta(-z, Z)) < 1e-12 * max(1, abs(theta(z, Z)))
        for j in range(2):
            assert abs(theta(z + np.eye(2)[j], Z) - theta(z, Z)) < 1e-10 * max(1, abs(theta(z, Z)))
            lhs = theta(z + Z[:, j], Z)
            rhs = np.exp(-1j * np.pi * Z[j, j] - 2j * np.pi * z[j]) * theta(z, Z)
            assert abs(lhs - rhs) < 1e-10 * max(1, abs(rhs))
        assert abs(theta_norm(z + Z[:, 0] + 3, Z) - theta_norm(z, Z)) < 1e-10


def test_theta_radius_doubling(g2):
    Z = g2[4].Z
    z = np.array([0.2 + 0.1j, -0.4 + 0.3j])
    R = ThetaConfig().radius_for(Z.imag)
    assert abs(theta(z, Z, ThetaConfig(radius=2 * R)) - theta(z, Z)) < 1e-12


def test_theta_config_errors():
    with pytest.raises(InputError):
        ThetaConfig(radius=2)
    with pytest.raises(NotPositiveDefinite):
        theta([0], [[-1j]])


def test_kappa_lemniscatic(g1):
    curve, p, q, loops, periods, it = g1
    k = riemann_constant(periods, it)
    assert JacobianPoint(k.v - (1 + 1j) / 2, periods.Z).is_zero(1e-7)
    assert abs(theta_norm(k.v, periods.Z)) < 1e-12


def test_kappa_two_code_paths(std):
    _, _, _, _, periods, it = std
    a = riemann_constant(periods, it)
    b = riemann_constant_from_traces(periods, it)
    assert np.max(np.abs(a.v - b.v)) < 1e-14


def test_kappa_canonical_and_control(std):
    curve, p, q, loops, periods, it = std
    rep = verify_kappa_canonical(curve, periods, loops, riemann_constant(periods, it))
    assert rep["pass"] and rep["residuals"][0] < 1e-6
    if curve.genus > 1:
        assert rep["negated_kappa_residual"] > 1e-2


def test_kappa_depends_on_basepoint(g2):
    curve, p, q, loops, periods, it = g2
    p2 = curve.point(-0.9 - 0.6j)
    L2 = build_homology_basis(curve, p2)
    per2 = compute_periods(curve, L2)
    k2 = riemann_constant(per2, compute_iter_matrices(curve, L2, per2.N))
    k1 = riemann_constant(periods, it)
    assert np.allclose(per2.Z, periods.Z, atol=1e-10)
    assert JacobianPoint(k1.v - k2.v, periods.Z).reduce().residual > 1e-3
    # the difference is (g-1) u(p2 - p)
    u = abel_jacobi_point(curve, periods, loops, p2)
    assert (k1 - JacobianPoint(k2.v, periods.Z) + (curve.genus - 1) * u).is_zero(1e-8)


def test_riemann_vanishing(g2, rng):
    curve, p, q, loops, periods, it = g2
    trials = [tuple(random_points(curve, rng, 1, avoid=[p.x])) for _ in range(4)]
    rep = verify_riemann_vanishing(curve, periods, loops, riemann_constant(periods, it), trials)
    assert rep["pass"]
    assert all(t["control_ratio"] > 1e-3 for t in rep["trials"])


def test_riemann_vanishing_g1(g1):
    curve, p, q, loops, periods, it = g1
    rep = verify_riemann_vanishing(curve, periods, loops, riemann_constant(periods, it), [()])
    assert rep["pass"] and rep["residuals"][0] < 1e-6
