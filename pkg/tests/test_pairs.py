import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warpgeo import pairs as pr
from warpgeo.core import riemann_fd
from warpgeo.errors import AlphaOne, NonHomogeneous
from warpgeo.profiles import constant, power

POTENTIALS = [pr.quadratic(2), pr.quadratic(3), pr.quadratic(4), pr.product2d(), pr.maschke()]


@pytest.fixture(scope="module", params=POTENTIALS, ids=lambda p: p.name)
def pair(request):
    return pr.hessian_cone_pair(request.param)


def test_quadratic_pair_closed_form():
    P, Q = pr.hessian_cone_pair(pr.quadratic(3))
    x = np.array([0.3, -0.4, 1.2])
    n2 = x @ x
    assert np.allclose(P.g(x), 2 * np.eye(3), atol=1e-14)
    assert np.allclose(Q.g(x), 4 * np.outer(x, x) / n2 - 2 * np.eye(3), atol=1e-13)
    assert np.allclose(pr.hat_metric_field(P)(x), Q.g(x), atol=1e-13)


def test_verify_pair(pair):
    P, Q = pair
    rng = np.random.default_rng(0)
    for M in (P, Q):
        rep = pr.verify_pair(M, 20, rng)
        assert rep.passed, rep.to_dict()


def test_flat_hessian_metric(pair):
    P, _ = pair
    rng = np.random.default_rng(1)
    for x in P.sample(rng, 5):
        assert np.linalg.norm(riemann_fd(P.g, x)) < 1e-4


def test_hat_sign_flip_is_detected():
    P, Q = pr.hessian_cone_pair(pr.quadratic(3))
    x = P.probe
    good = pr.hat_metric_field(P, 1.0)(x)
    bad = pr.hat_metric_field(P, -1.0)(x)
    assert np.max(np.abs(good - Q.g(x))) < 1e-12
    assert np.max(np.abs(bad - Q.g(x))) > 1.0


@settings(max_examples=25, deadline=None)
@given(r=st.floats(0.3, 3), u=st.tuples(st.floats(-0.3, 0.3), st.floats(-0.3, 0.3)))
def test_split_roundtrip_and_pullback(r, u):
    P, _ = pr.hessian_cone_pair(pr.quadratic(3))
    for v in (constant(1.0), power(1.0), power(-2.0)):
        sp = pr.split(P, 1.0, v)
        x = sp.psi(r, np.array(u))
        back = sp.psi_inv(x)
        assert np.allclose(back, np.r_[r, u], atol=1e-10)
        assert sp.pullback_residual(r, np.array(u)) < 1e-6


def test_level_relation_dim3():
    P, _ = pr.hessian_cone_pair(pr.quadratic(3))
    rep = pr.level_curvature_relation(P, 1.0, rng=np.random.default_rng(2))
    assert rep.passed, rep.to_dict()


def test_inversion_is_isometry():
    P, _ = pr.hessian_cone_pair(pr.product2d())
    rep = pr.isometry_check(pr.inversion_map(P), P.g, pr.conformal_metric(P, power(-2.0)), P.sample(np.random.default_rng(3), 8))
    assert rep.passed, rep.to_dict()


@settings(max_examples=15, deadline=None)
@given(A=st.tuples(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5), st.floats(-0.5, 0.5)), t=st.floats(0.05, 0.5))
def test_beta_zero_geodesics_are_lines(A, t):
    # f^0 g = 2 I for the quadratic potential
    P, _ = pr.hessian_cone_pair(pr.quadratic(3))
    x0 = P.probe
    A = np.array(A)
    pg = pr.pair_geodesic(P, 0.0, x0, A)
    if t >= pg.t_domain[1]:
        return
    assert np.allclose(pg(t)[0], x0 + t * A, atol=1e-9)


def test_lorentz_signatures():
    P, Q = pr.hessian_cone_pair(pr.lorentz_quadratic(3))
    assert P.g.signature == (1, 2)
    _, rep = pr.hat_metric(P)
    assert rep.consistent


def test_convexity_table():
    P, _ = pr.hessian_cone_pair(pr.quadratic(3))
    assert pr.level_definiteness(P) == "positive"
    assert pr.f_convexity(P, -1.0) is pr.Convexity.CONVEX
    assert pr.f_convexity(P, 0.5) is pr.Convexity.CONVEX
    assert pr.f_convexity(P, 2.0, "negative") is pr.Convexity.CONCAVE
    assert pr.f_convexity(P, 2.0, "positive") is pr.Convexity.INDETERMINATE


def test_bad_potentials():
    with pytest.raises(NonHomogeneous):
        pr.hessian_cone_pair(pr.user_polynomial([[1.0, [2, 0]], [1.0, [0, 3]]], 2, [1.0, 1.0], alpha=2.0))
    with pytest.raises(AlphaOne):
        pr.hessian_cone_pair(pr.user_polynomial([[1.0, [1, 0]], [1.0, [0, 1]]], 2, [1.0, 1.0]))
