"""Profiles w(s, C1, C2, r) solving K(d_r) = C for the warped metric g(w).

With x = log r + C2 the three regimes are

    Delta1 (s > 0, C1 > 0):   w = C1 / (s cosh^2(sqrt(C1) x))
    Delta2 (s = 0, C1 >= 0):  w = exp(C2) r^(+-2 sqrt(C1))
    Delta3 (s < 0, C1 < 0):   w = C1 / (s sin^2(sqrt(-C1) x))
           (s < 0, C1 = 0):   w = -1 / (s x^2)

and g(w(kC, C1, C2, .)) has radial curvature identically C.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidRegime
from .profiles import RadialProfile, inverted
from .warped import WarpedMetric, k_radial


class Regime(str, enum.Enum):
    DELTA1 = "Delta1"
    DELTA2 = "Delta2"
    DELTA3 = "Delta3"
    INVALID = "Invalid"


@dataclass(frozen=True)
class CscParams:
    s: float
    C1: float
    C2: float = 0.0
    branch_sign: int = 1

    def __post_init__(self):
        if self.branch_sign not in (1, -1):
            raise ValueError("branch_sign must be +1 or -1")


def regime_of(p: CscParams) -> Regime:
    if p.s > 0 and p.C1 > 0:
        return Regime.DELTA1
    if p.s == 0 and p.C1 >= 0:
        return Regime.DELTA2
    if p.s < 0 and p.C1 <= 0:
        return Regime.DELTA3
    return Regime.INVALID


def pole_generator(p: CscParams):
    """Return ``(N -> pole)`` for Delta3 sine profiles, else None."""
    if regime_of(p) is not Regime.DELTA3:
        return None
    if p.C1 == 0:
        return lambda N: math.exp(-p.C2)
    b = math.sqrt(-p.C1)
    return lambda N: math.exp(N * math.pi / b - p.C2)


def _poles_fn(p: CscParams):
    if regime_of(p) is not Regime.DELTA3:
        return None
    if p.C1 == 0:
        pole = math.exp(-p.C2)

        def poles(a, b):
            return np.array([pole]) if a <= pole <= b else np.empty(0)

        return poles
    bb = math.sqrt(-p.C1)
    gen = pole_generator(p)

    def poles(a, b):
        a = max(a, 1e-300)
        n_lo = math.ceil((math.log(a) + p.C2) * bb / math.pi)
        n_hi = math.floor((math.log(b) + p.C2) * bb / math.pi)
        return np.array([gen(N) for N in range(n_lo, n_hi + 1)])

    return poles


def _w_and_x_derivs(p: CscParams, x):
    """w and its first two derivatives in x = log r + C2."""
    reg = regime_of(p)
    s, C1 = p.s, p.C1
    if reg is Regime.DELTA1:
        a = math.sqrt(C1)
        e = np.exp(-2.0 * np.abs(a * x))
        sech2 = 4.0 * e / (1.0 + e) ** 2  # no overflow for large |x|
        th = np.tanh(a * x)
        w = C1 / s * sech2
        return w, -2 * a * th * w, 2 * a * a * w * (3 * th**2 - 1)
    if reg is Regime.DELTA3 and C1 < 0:
        b = math.sqrt(-C1)
        csc2 = 1.0 / np.sin(b * x) ** 2
        ct = np.cos(b * x) / np.sin(b * x)
        w = C1 / s * csc2
        return w, -2 * b * ct * w, 2 * b * b * w * (3 * ct**2 + 1)
    if reg is Regime.DELTA3:
        w = -1.0 / (s * x**2)
        return w, 2.0 / (s * x**3), -6.0 / (s * x**4)
    raise InvalidRegime(f"parameters {p} are not in Delta1, Delta2 or Delta3")


def csc_profile(p: CscParams) -> RadialProfile:
    """The profile r -> w(s, C1, C2, r) with analytic derivatives."""
    reg = regime_of(p)
    if reg is Regime.INVALID:
        raise InvalidRegime(f"invalid regime: (s, C1) = ({p.s}, {p.C1})")
    meta = {"s": p.s, "C1": p.C1, "C2": p.C2, "branch_sign": p.branch_sign, "regime": reg.value}
    if reg is Regime.DELTA2:
        q = p.branch_sign * 2.0 * math.sqrt(p.C1)
        c = math.exp(p.C2)
        return RadialProfile(
            lambda r: c * r**q,
            lambda r: c * q * r ** (q - 1),
            lambda r: c * q * (q - 1) * r ** (q - 2),
            order0=q,
            coef0=c,
            order_inf=q,
            coef_inf=c,
            label="csc-power",
            params=meta,
        )

    def fn(r):
        return _w_and_x_derivs(p, np.log(r) + p.C2)[0]

    def d1(r):
        _, wx, _ = _w_and_x_derivs(p, np.log(r) + p.C2)
        return wx / r

    def d2(r):
        _, wx, wxx = _w_and_x_derivs(p, np.log(r) + p.C2)
        return (wxx - wx) / r**2

    if reg is Regime.DELTA1:
        a = math.sqrt(p.C1)
        base = 4.0 * p.C1 / p.s
        return RadialProfile(
            fn,
            d1,
            d2,
            order0=2 * a,
            coef0=base * math.exp(2 * a * p.C2),
            order_inf=-2 * a,
            coef_inf=base * math.exp(-2 * a * p.C2),
            label="csc-cosh",
            params=meta,
        )
    return RadialProfile(fn, d1, d2, poles=_poles_fn(p), label="csc-sine", params=meta)


def w_eval(p: CscParams, r):
    """Return ``(w, w', w'')`` at r (derivatives in r)."""
    prof = csc_profile(p)
    return prof(r), prof.deriv1(r), prof.deriv2(r)


_CONSTRUCTION_PROBES = (0.37, 0.9, 1.7, 3.1)


def solve_csc_profile(k: float, C: float, C1: float, C2: float = 0.0, branch_sign: int = 1, check: bool = True) -> RadialProfile:
    """Profile w with K(d_r) = C for g(w) with the given k.

    The solution is w(kC, C1, C2, .); on construction the closed-form radial
    curvature is checked at a few probe radii.
    """
    if k == 0:
        raise ValueError("k must be nonzero")
    params = CscParams(k * C, C1, C2, branch_sign)
    prof = csc_profile(params)
    if check:
        from .fibers import flat

        W = WarpedMetric(k, prof, flat(1))
        for r in _CONSTRUCTION_PROBES:
            try:
                prof.check_pole(r)
            except Exception:
                continue
            kr = float(k_radial(W, r))
            if abs(kr - C) > 1e-5 * max(1.0, abs(C)) and np.isfinite(kr):
                raise AssertionError(f"constructed profile misses C at r={r}: {kr}")
    return prof


def inversion_dual(w1: RadialProfile) -> RadialProfile:
    """w2(r) = w1(1/r); g(w1) and g(w2) are isometric via (r, y) -> (1/r, y)."""
    return inverted(w1)
