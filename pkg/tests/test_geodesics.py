import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warpgeo.core import GeodesicState, integrate_geodesic
from warpgeo.errors import DomainExceeded
from warpgeo.fibers import circle, flat, hyperbolic, minkowski, sphere
from warpgeo.geodesics import (
    Convexity,
    FiberSign,
    GeodesicInit,
    ThetaBranch,
    conservation_residuals,
    explicit_geodesic,
    fiber_sign,
    radial_convexity,
    theta_branch,
)
from warpgeo.warped import as_metric_field


@settings(max_examples=30, deadline=None)
@given(r0=st.floats(0.3, 3), rdot=st.floats(-2, 2), phidot=st.floats(-2, 2), t=st.floats(0, 1))
def test_polar_plane_geodesics_are_straight_lines(r0, rdot, phidot, t):
    # k = 1, w = r^2 over a circle is the flat plane in polar coordinates
    init = GeodesicInit(r0, [0.0], rdot, [phidot])
    p = explicit_geodesic(1.0, 2.0, init, circle())
    x = np.array([r0 + rdot * t, r0 * phidot * t])
    rr = float(np.hypot(*x))
    if rr < 1e-6 or t >= p.t_max:
        return
    pos = p.position(t)[0]
    assert pos[0] == pytest.approx(rr, rel=1e-10, abs=1e-12)
    assert pos[1] == pytest.approx(math.atan2(x[1], x[0]), abs=1e-9)


def test_c0_zero_is_exponential():
    init = GeodesicInit(1.5, [0.0, 0.0], 0.3, [0.2, -0.1])
    p = explicit_geodesic(1.0, 0.0, init, flat(2))
    t = np.linspace(0, 3, 7)
    assert np.allclose(p.r(t), 1.5 * np.exp(0.2 * t), rtol=1e-14)
    assert p.complete


def test_domain_is_enforced():
    p = explicit_geodesic(1.0, 2.0, GeodesicInit(1.0, [0.0, 0.0], -0.5, [0.0, 0.0]), flat(2))
    assert p.branch is ThetaBranch.RATIONAL
    assert p.t_max == pytest.approx(2.0)
    with pytest.raises(DomainExceeded):
        p.r(2.5)


@pytest.mark.parametrize(
    "k, init, G, branch",
    [
        (1.0, GeodesicInit(1.0, [0, 0], 0.0, [0, 0]), 0.0, ThetaBranch.IDENTITY),
        (1.0, GeodesicInit(1.0, [0, 0], 0.5, [0, 0]), 0.0, ThetaBranch.RATIONAL),
        (1.0, GeodesicInit(1.0, [0, 0], 0.0, [1, 0]), 1.0, ThetaBranch.ARCTAN),
        (-1.0, GeodesicInit(1.0, [0, 0], 0.3, [1, 0]), 1.0, ThetaBranch.ARCTANH),
    ],
)
def test_theta_branch_selection(k, init, G, branch):
    assert theta_branch(k, init, G) is branch


def test_log_branch_needs_null_fiber_speed():
    init = GeodesicInit(1.0, [0.0, 0.0], 0.5, [0.5, 0.0])
    p = explicit_geodesic(1.0, 1.0, init, minkowski(2))
    assert p.branch is ThetaBranch.LOG


@settings(max_examples=12, deadline=None)
@given(
    k=st.floats(0.3, 2),
    C0=st.floats(-3, 3).filter(lambda c: abs(c) > 1e-3),
    r0=st.floats(0.5, 2),
    rdot=st.floats(-1, 1),
    v=st.tuples(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5)),
    fib=st.sampled_from([flat(2), sphere(2), hyperbolic(2)]),
)
def test_explicit_matches_ode(k, C0, r0, rdot, v, fib):
    y0 = fib.base_point()
    init = GeodesicInit(r0, y0, rdot, list(v))
    p = explicit_geodesic(k, C0, init, fib)
    T = min(0.9 * p.t_max, 1.5)
    tt = np.linspace(0, T, 20)
    tr = integrate_geodesic(as_metric_field(p.warped_metric()), GeodesicState(np.r_[r0, y0], np.r_[rdot, v]), T, tol=1e-11)
    assert tr.status == "ok"
    xs, _ = tr(tt)
    scale = max(1.0, float(np.max(np.abs(xs))))
    assert np.max(np.abs(xs - p.position(tt))) < 1e-6 * scale
    c = conservation_residuals(p, tt[:-1])
    assert c.e1_residual < 1e-7 and c.e2_residual < 1e-7


def test_fiber_sign_and_convexity_table():
    assert fiber_sign(1.0, sphere(2)) is FiberSign.POSITIVE
    assert fiber_sign(-1.0, sphere(2)) is FiberSign.NEGATIVE
    assert fiber_sign(1.0, minkowski(2)) is FiberSign.OTHER
    assert radial_convexity(1.0, 0.0, FiberSign.OTHER) is Convexity.CONVEX
    assert radial_convexity(1.0, 1.0, FiberSign.POSITIVE) is Convexity.CONVEX
    assert radial_convexity(1.0, 3.0, FiberSign.NEGATIVE) is Convexity.CONCAVE
    assert radial_convexity(1.0, -1.0, FiberSign.NEGATIVE) is Convexity.CONVEX
    assert radial_convexity(1.0, 3.0, FiberSign.POSITIVE) is Convexity.INDETERMINATE


@settings(max_examples=20, deadline=None)
@given(C0=st.floats(0.05, 2), r0=st.floats(0.5, 2), rdot=st.floats(-1, 1), v=st.floats(0.1, 1))
def test_convex_branch_second_differences(C0, r0, rdot, v):
    p = explicit_geodesic(1.0, C0, GeodesicInit(r0, [0.0, 0.0], rdot, [v, 0.0]), flat(2))
    T = min(0.9 * p.t_max, 2.0)
    r = p.r(np.linspace(0, T, 41))
    assert np.all(np.diff(r, 2) >= -1e-8)
