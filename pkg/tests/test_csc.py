import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from warpgeo.core import sectional_curvature_fd_richardson
from warpgeo.csc import CscParams, Regime, csc_profile, inversion_dual, regime_of, solve_csc_profile
from warpgeo.errors import InvalidRegime, PoleHit
from warpgeo.fibers import flat
from warpgeo.warped import WarpedMetric, as_metric_field, k_radial


@pytest.mark.parametrize(
    "s, C1, regime",
    [(1, 1, Regime.DELTA1), (0, 0, Regime.DELTA2), (0, 2, Regime.DELTA2), (-1, -1, Regime.DELTA3), (-1, 0, Regime.DELTA3), (1, -1, Regime.INVALID), (0, -1, Regime.INVALID), (-1, 1, Regime.INVALID), (1, 0, Regime.INVALID)],
)
def test_regime_table(s, C1, regime):
    assert regime_of(CscParams(s, C1)) is regime


def test_invalid_regime_raises():
    with pytest.raises(InvalidRegime):
        csc_profile(CscParams(1.0, -1.0))


def test_delta1_closed_form():
    w = csc_profile(CscParams(2.0, 4.0, 0.5))
    r = 1.7
    x = math.log(r) + 0.5
    assert float(w(r)) == pytest.approx(4.0 / (2.0 * math.cosh(2.0 * x) ** 2), rel=1e-14)


def _radial_fd(W, r):
    g = as_metric_field(W)
    return sectional_curvature_fd_richardson(g, np.array([r, 0.0]), [1.0, 0.0], [0.0, 1.0])


@settings(max_examples=40, deadline=None)
@given(
    k=st.floats(0.2, 3),
    C=st.floats(-2, 2),
    C1=st.floats(0.05, 2),
    C2=st.floats(-1, 1),
    r=st.floats(0.3, 3),
)
def test_radial_curvature_is_C(k, C, C1, C2, r):
    assume(abs(C) > 1e-3)
    C1 = C1 if C > 0 else -C1
    w = solve_csc_profile(k, C, C1, C2, check=False)
    W = WarpedMetric(k, w, flat(1))
    try:
        w.check_pole(r)
        w.check_pole([0.99 * r, 1.01 * r])
    except PoleHit:
        assume(False)
    val = float(w(r))
    assume(np.isfinite(val) and 1e-6 < val < 1e6)
    assert k_radial(W, r) == pytest.approx(C, abs=1e-6)
    assert _radial_fd(W, r) == pytest.approx(C, abs=1e-4 * max(1.0, val))


def test_pole_hit_is_reported():
    w = csc_profile(CscParams(-1.0, -1.0))
    with pytest.raises(PoleHit):
        w(1.0)  # x = 0 is a pole of the sine branch


@settings(max_examples=20, deadline=None)
@given(C1=st.floats(0.1, 2), C2=st.floats(-1, 1), r=st.floats(0.3, 3))
def test_inversion_dual_preserves_radial_curvature(C1, C2, r):
    w1 = solve_csc_profile(1.0, 1.0, C1, C2)
    w2 = inversion_dual(w1)
    W1, W2 = WarpedMetric(1.0, w1, flat(1)), WarpedMetric(1.0, w2, flat(1))
    assert float(w2(r)) == pytest.approx(float(w1(1 / r)), rel=1e-13)
    assert k_radial(W2, r) == pytest.approx(k_radial(W1, 1 / r), abs=1e-8)
