import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warpgeo.core import sectional_curvature_fd
from warpgeo.fibers import by_name, flat, hyperbolic, sphere
from warpgeo.profiles import constant, from_function, power
from warpgeo.warped import WarpedMetric, as_metric_field, csc_check, k_fiber, k_general, k_radial


def test_k_must_be_nonzero():
    with pytest.raises(ValueError):
        WarpedMetric(0.0, power(1.0), sphere(2))


@settings(max_examples=30, deadline=None)
@given(p=st.floats(-3, 3).filter(lambda p: abs(p) > 0.05), k=st.floats(0.1, 4), r=st.floats(0.3, 3))
def test_power_profiles_are_cones(p, k, r):
    # g = k r^(p-2) dr^2 + r^p g_Y is the cone d rho^2 + (p^2/4k) rho^2 g_Y
    for K_Y, fib in ((1.0, sphere(2)), (0.0, flat(2)), (-1.0, hyperbolic(2))):
        W = WarpedMetric(k, power(p), fib)
        assert abs(k_radial(W, r)) < 1e-9
        expected = (K_Y - p * p / (4 * k)) / r**p
        assert k_fiber(W, r, [1, 0], [0, 1]) == pytest.approx(expected, rel=1e-9, abs=1e-9)


def test_cylinder_curvatures():
    W = WarpedMetric(1.0, constant(2.0), sphere(2))
    assert k_radial(W, 0.7) == pytest.approx(0.0, abs=1e-12)
    assert k_fiber(W, 0.7, [1, 0], [0, 1]) == pytest.approx(0.5)


def test_closed_forms_match_fd_oracle():
    rng = np.random.default_rng(3)
    w = from_function(lambda r: r**2 / (1 + r**2), label="bump")
    for fib in (sphere(2), hyperbolic(2), flat(2)):
        W = WarpedMetric(0.8, w, fib)
        g = as_metric_field(W)
        for _ in range(5):
            r = rng.uniform(0.5, 2.0)
            y = fib.sample(rng, 1)[0]
            A, B = rng.normal(size=3), rng.normal(size=3)
            K_fd = sectional_curvature_fd(g, np.r_[r, y], A, B)
            assert k_general(W, r, y, A, B) == pytest.approx(K_fd, abs=2e-4)


def test_csc_check_on_flat_cone():
    W = WarpedMetric(0.25, power(1.0), by_name("sphere", 2))
    rep = csc_check(W, 0.0)
    assert rep.passed
