import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warpgeo.completion import (
    CompletionTag,
    EbinLabel,
    Finiteness,
    TTransform,
    WLimit,
    classify,
    classify_pair,
    classify_warped,
    diameter_bound_check,
    ebin_class,
    length_lower_bound_check,
    path_length,
    segment_length,
)
from warpgeo.csc import solve_csc_profile
from warpgeo.errors import HypothesisNotMet, NegativeAlpha, NotPositiveDefinite, PoleInDomain
from warpgeo.fibers import circle, minkowski, sphere
from warpgeo.profiles import constant, from_function, power
from warpgeo.warped import WarpedMetric


@settings(max_examples=30, deadline=None)
@given(p=st.floats(-3, 3).filter(lambda p: abs(p) > 0.05), k=st.floats(0.2, 4), r=st.floats(0.05, 20))
def test_T_of_power_profile(p, k, r):
    T = TTransform(power(p), k=k)
    exact = math.sqrt(k) * (r ** (p / 2) - 1) / (p / 2)
    assert T(r) == pytest.approx(exact, rel=1e-9, abs=1e-10)


def test_T_of_constant_is_log():
    T = TTransform(constant(4.0))
    assert T(math.e**3) == pytest.approx(6.0, rel=1e-12)


@pytest.mark.parametrize(
    "w, tag",
    [
        (constant(1.0), CompletionTag.CYLINDER),
        (power(1.5), CompletionTag.CONE_AT_ZERO),
        (power(-0.5), CompletionTag.CONE_AT_INFINITY),
        (solve_csc_profile(1.0, 1.0, 1.0), CompletionTag.SUSPENSION),
        # untagged profiles go through the dyadic bracket test
        (from_function(lambda r: 1.0 + 0 * r), CompletionTag.CYLINDER),
        (from_function(lambda r: r**2), CompletionTag.CONE_AT_ZERO),
        (from_function(lambda r: 1 / r), CompletionTag.CONE_AT_INFINITY),
        (from_function(lambda r: r**2 / (1 + r**2) ** 2), CompletionTag.SUSPENSION),
    ],
)
def test_classification_cases(w, tag):
    assert classify(TTransform(w)).tag is tag


def test_exponent_and_quadrature_agree():
    tagged = classify(TTransform(power(2.0))).behavior
    untagged = classify(TTransform(from_function(lambda r: r**2))).behavior
    assert tagged.T0.kind is untagged.T0.kind is Finiteness.FINITE
    assert tagged.Tinf.kind is untagged.Tinf.kind is Finiteness.INFINITE
    assert untagged.T0.value == pytest.approx(-1.0, abs=1e-6)
    assert tagged.w_limit_0 is untagged.w_limit_0 is WLimit.ZERO


def test_slowly_divergent_end_is_unclassified_not_finite():
    # T grows like log log r: the bracket test must not call this finite
    c = classify(TTransform(from_function(lambda r: 1 / (1 + np.log(1 + r) ** 2))))
    assert c.behavior.Tinf.kind is Finiteness.INCONCLUSIVE
    assert c.tag is CompletionTag.UNCLASSIFIED
    assert c.case is None


def test_classification_guards():
    with pytest.raises(NotPositiveDefinite):
        classify(TTransform(power(1.0), k=-1.0))
    with pytest.raises(NotPositiveDefinite):
        classify_warped(WarpedMetric(1.0, power(1.0), minkowski(2)))
    with pytest.raises(PoleInDomain):
        classify(TTransform(solve_csc_profile(1.0, -1.0, -1.0)))
    with pytest.raises(NegativeAlpha):
        classify_pair(-1.0, constant(1.0))


@pytest.mark.parametrize("n", [2, 3, 5])
def test_ebin_table(n):
    assert ebin_class(n, 1).label is EbinLabel.M_FINITE_PLUS
    assert ebin_class(n, 0).label is EbinLabel.M_FINITE
    assert ebin_class(n, -1).label is EbinLabel.M_FINITE
    assert ebin_class(n, 2).label is EbinLabel.M_FINITE_PLUS_WITH_GINF
    assert ebin_class(n, 2).alpha == n / 2


def test_polar_plane_lengths():
    # k = 1, w = r^2 over a circle is the Euclidean plane in polar coordinates
    W = WarpedMetric(1.0, power(2.0), circle())
    assert segment_length(W, [1.0, 0.3], [3.0, 0.3]) == pytest.approx(2.0, rel=1e-10)
    # a coordinate segment in the angle is a circular arc
    assert segment_length(W, [2.0, 0.0], [2.0, 1.0]) == pytest.approx(2.0, rel=1e-10)
    assert path_length(W, [[1.0, 0.0], [2.0, 0.0], [2.0, 1.0]]) == pytest.approx(3.0, rel=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.tuples(st.floats(0.05, 20), st.floats(-0.4, 0.4), st.floats(-0.4, 0.4)), min_size=2, max_size=5))
def test_length_dominates_T_gap(verts):
    W = WarpedMetric(0.7, power(1.3), sphere(2))
    rep = length_lower_bound_check(W, [list(v) for v in verts])
    assert rep.passed, (rep.length, rep.bound)


def test_diameter_bound_cone():
    W = WarpedMetric(0.25, power(1.0), sphere(2))
    rng = np.random.default_rng(0)
    pairs = [(np.r_[rng.uniform(0.5, 2), sphere(2).sample(rng, 1)[0]], np.r_[rng.uniform(0.5, 2), sphere(2).sample(rng, 1)[0]]) for _ in range(5)]
    reps = diameter_bound_check(W, pairs)
    assert all(r.passed for r in reps)


def test_diameter_bound_needs_finite_end():
    W = WarpedMetric(1.0, constant(1.0), sphere(2))
    with pytest.raises(HypothesisNotMet):
        diameter_bound_check(W, [([1.0, 0.0, 0.0], [2.0, 0.1, 0.0])])
