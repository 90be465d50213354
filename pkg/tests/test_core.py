import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warpgeo.core import (
    GeodesicState,
    MetricField,
    check_plane,
    christoffel_fd,
    constant_metric,
    euclidean,
    integrate_geodesic,
    riemann_fd,
    sectional_curvature_fd,
    sectional_curvature_fd_richardson,
    signature_of,
)
from warpgeo.errors import ChartExit, DegenerateMetric, DegeneratePlane


def _diag(d0, d1):
    out = np.zeros(np.shape(d0) + (2, 2))
    out[..., 0, 0] = d0
    out[..., 1, 1] = d1
    return out


def round_sphere():
    # (theta, phi) chart away from the poles
    return MetricField(2, lambda x: _diag(np.ones_like(x[..., 0]), np.sin(x[..., 0]) ** 2), (2, 0), lambda x: min(x[0], math.pi - x[0]), "S2")


def upper_half_plane():
    return MetricField(2, lambda x: _diag(1 / x[..., 1] ** 2, 1 / x[..., 1] ** 2), (2, 0), lambda x: x[1], "H2")


def test_flat_metric_has_zero_curvature():
    g = euclidean(3)
    assert np.max(np.abs(riemann_fd(g, [0.3, -1.0, 2.0]))) == 0.0


@pytest.mark.parametrize("g, K", [(round_sphere(), 1.0), (upper_half_plane(), -1.0)])
def test_space_form_curvature(g, K):
    for x in ([1.0, 0.4], [0.7, 2.0], [2.1, 0.5]):
        assert sectional_curvature_fd(g, x, [1, 0], [0, 1]) == pytest.approx(K, abs=1e-5)
        assert sectional_curvature_fd_richardson(g, x, [1, 0], [0, 1]) == pytest.approx(K, abs=1e-7)


def test_christoffel_lower_symmetry_is_exact():
    G = christoffel_fd(round_sphere(), [0.9, 0.1])
    assert np.array_equal(G, np.swapaxes(G, 1, 2))


def test_sectional_depends_only_on_plane():
    g = upper_half_plane()
    x = [0.2, 1.3]
    a, b = np.array([1.0, 0.5]), np.array([-0.3, 2.0])
    K1 = sectional_curvature_fd(g, x, a, b)
    K2 = sectional_curvature_fd(g, x, 2 * a + b, a - 3 * b)
    assert K1 == pytest.approx(K2, abs=1e-8)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=9, max_size=9))
def test_constant_spd_metric_is_flat(entries):
    A = np.array(entries).reshape(3, 3)
    M = A @ A.T + np.eye(3)
    g = constant_metric(M)
    assert np.max(np.abs(riemann_fd(g, [0.1, 0.2, 0.3]))) < 1e-12


def test_signature_and_degeneracy():
    assert signature_of(np.diag([1.0, -2.0, 3.0])) == (2, 1)
    with pytest.raises(DegeneratePlane):
        check_plane(np.eye(2), [1.0, 0.0], [2.0, 0.0])
    g = MetricField(2, lambda x: _diag(np.ones_like(x[..., 0]), np.zeros_like(x[..., 0])))
    with pytest.raises(DegenerateMetric):
        sectional_curvature_fd(g, [0.0, 0.0], [1, 0], [0, 1])


def test_geodesic_on_sphere_is_great_circle():
    g = round_sphere()
    s0 = GeodesicState(np.array([math.pi / 2, 0.0]), np.array([0.0, 1.0]))
    tr = integrate_geodesic(g, s0, 3.0, tol=1e-11)
    assert tr.status == "ok"
    assert np.max(np.abs(tr.x[:, 0] - math.pi / 2)) < 1e-9
    assert np.max(np.abs(tr.x[:, 1] - tr.t)) < 1e-9
    assert np.max(np.abs(tr.speed - tr.speed[0])) < 1e-9


def test_geodesic_chart_exit():
    g = upper_half_plane()
    flat = MetricField(2, euclidean(2).fn, (2, 0), lambda x: 1.0 - x[0])
    s0 = GeodesicState(np.zeros(2), np.array([1.0, 0.0]))
    tr = integrate_geodesic(flat, s0, 5.0)
    assert tr.status == "chart_exit"
    assert tr.t_reached == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ChartExit):
        integrate_geodesic(flat, s0, 5.0, strict=True)
    # vertical geodesic y = exp(-t); FD Christoffels limit accuracy as y shrinks
    tr = integrate_geodesic(g, GeodesicState(np.array([0.0, 1.0]), np.array([0.0, -1.0])), 2.0)
    assert tr.x[-1, 1] == pytest.approx(math.exp(-2.0), rel=1e-7)
