"""Positive radial profiles w(r) on r > 0 with derivatives and asymptotics."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import PoleHit

POLE_RTOL = 1e-9
_H1 = np.finfo(float).eps ** (1.0 / 3.0)
_H2 = np.finfo(float).eps ** (1.0 / 4.0)


def _no_poles(a, b):
    return np.empty(0)


@dataclass(frozen=True)
class RadialProfile:
    """A positive function of r > 0.

    ``poles(a, b)`` lists the excluded radii inside ``[a, b]`` (pole sets may be
    infinite, so they are only materialized on request).  ``order0``/``coef0``
    and ``order_inf``/``coef_inf`` record ``w(r) ~ coef * r**order`` as r tends
    to 0 and infinity respectively.
    """

    fn: Callable
    d1: Optional[Callable] = None
    d2: Optional[Callable] = None
    poles: Callable = _no_poles
    order0: Optional[float] = None
    coef0: Optional[float] = None
    order_inf: Optional[float] = None
    coef_inf: Optional[float] = None
    label: str = "user"
    params: Optional[dict] = None

    @property
    def has_poles(self) -> bool:
        return self.poles is not _no_poles

    def check_pole(self, r) -> None:
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if not self.has_poles:
            return
        lo, hi = r.min(), r.max()
        ps = self.poles(lo * (1 - 2 * POLE_RTOL) - POLE_RTOL, hi * (1 + 2 * POLE_RTOL) + POLE_RTOL)
        for p in np.atleast_1d(ps):
            if np.any(np.abs(r - p) < POLE_RTOL * max(1.0, p)):
                raise PoleHit(f"r is at a pole of the profile ({p:.17g})")

    def __call__(self, r):
        self.check_pole(r)
        return self.fn(np.asarray(r, dtype=float))

    def deriv1(self, r):
        r = np.asarray(r, dtype=float)
        self.check_pole(r)
        if self.d1 is not None:
            return self.d1(r)
        h = _H1 * np.maximum(1.0, np.abs(r))
        h = np.minimum(h, 0.25 * r)
        return (self.fn(r + h) - self.fn(r - h)) / (2 * h)

    def deriv2(self, r):
        r = np.asarray(r, dtype=float)
        self.check_pole(r)
        if self.d2 is not None:
            return self.d2(r)
        h = _H2 * np.maximum(1.0, np.abs(r))
        h = np.minimum(h, 0.25 * r)
        return (self.fn(r + h) - 2 * self.fn(r) + self.fn(r - h)) / h**2

    def scaled(self, lam: float) -> "RadialProfile":
        lam = float(lam)
        d1 = None if self.d1 is None else (lambda r, f=self.d1: lam * f(r))
        d2 = None if self.d2 is None else (lambda r, f=self.d2: lam * f(r))
        return RadialProfile(
            lambda r, f=self.fn: lam * f(r),
            d1,
            d2,
            self.poles,
            self.order0,
            None if self.coef0 is None else lam * self.coef0,
            self.order_inf,
            None if self.coef_inf is None else lam * self.coef_inf,
            label=f"{lam:g}*{self.label}",
            params=None,
        )

    def asymptotics_ok(self, probes=(1e-6, 1e6), rtol=0.05) -> bool:
        """Check the recorded asymptotic metadata at small and large probes."""
        ok = True
        if self.order0 is not None:
            r = probes[0]
            ok &= abs(self.fn(r) / (self.coef0 * r**self.order0) - 1) < rtol
        if self.order_inf is not None:
            r = probes[1]
            ok &= abs(self.fn(r) / (self.coef_inf * r**self.order_inf) - 1) < rtol
        return bool(ok)


def power(p: float, coef: float = 1.0) -> RadialProfile:
    """w(r) = coef * r**p."""
    p = float(p)
    c = float(coef)
    if c <= 0:
        raise ValueError("coefficient must be positive")
    return RadialProfile(
        lambda r: c * r**p,
        lambda r: c * p * r ** (p - 1),
        lambda r: c * p * (p - 1) * r ** (p - 2),
        order0=p,
        coef0=c,
        order_inf=p,
        coef_inf=c,
        label="power",
        params={"p": p, "coef": c},
    )


def constant(c: float = 1.0) -> RadialProfile:
    prof = power(0.0, c)
    return replace(prof, label="constant", params={"value": float(c)})


def from_function(fn, d1=None, d2=None, label="user") -> RadialProfile:
    return RadialProfile(fn, d1, d2, label=label)


def from_table(r, w) -> RadialProfile:
    """Interpolate tabulated values with a cubic spline in (log r, log w)."""
    r = np.asarray(r, dtype=float)
    w = np.asarray(w, dtype=float)
    if np.any(r <= 0) or np.any(w <= 0):
        raise ValueError("table radii and values must be positive")
    order = np.argsort(r)
    r, w = r[order], w[order]
    spl = CubicSpline(np.log(r), np.log(w))
    ds1 = spl.derivative(1)
    ds2 = spl.derivative(2)

    def fn(q):
        return np.exp(spl(np.log(q)))

    def d1(q):
        return fn(q) * ds1(np.log(q)) / q

    def d2(q):
        s1 = ds1(np.log(q))
        return fn(q) * (s1**2 + ds2(np.log(q)) - s1) / q**2

    return RadialProfile(fn, d1, d2, label="user-table", params={"r": r.tolist(), "w": w.tolist()})


def inverted(w1: RadialProfile) -> RadialProfile:
    """w2(r) = w1(1/r); poles map to reciprocal poles and the ends swap."""

    def fn(r):
        return w1.fn(1.0 / r)

    def d1(r):
        return -w1.deriv1(1.0 / r) / r**2

    def d2(r):
        q = 1.0 / r
        return w1.deriv2(q) / r**4 + 2.0 * w1.deriv1(q) / r**3

    def inv_poles(a, b):
        a = max(a, 1e-300)
        ps = np.atleast_1d(w1.poles(1.0 / b, 1.0 / a))
        return np.sort(1.0 / ps) if ps.size else ps

    return RadialProfile(
        fn,
        d1,
        d2,
        inv_poles if w1.has_poles else _no_poles,
        order0=None if w1.order_inf is None else -w1.order_inf,
        coef0=w1.coef_inf,
        order_inf=None if w1.order0 is None else -w1.order0,
        coef_inf=w1.coef0,
        label=f"inverted({w1.label})",
        params=None,
    )


def times_power(w: RadialProfile, q: float, coef: float = 1.0) -> RadialProfile:
    """r -> coef * r**q * w(r), used to pass between w- and v-profiles."""
    q = float(q)
    c = float(coef)

    def fn(r):
        return c * r**q * w.fn(r)

    def d1(r):
        return c * (q * r ** (q - 1) * w.fn(r) + r**q * w.deriv1(r))

    def d2(r):
        return c * (
            q * (q - 1) * r ** (q - 2) * w.fn(r)
            + 2 * q * r ** (q - 1) * w.deriv1(r)
            + r**q * w.deriv2(r)
        )

    return RadialProfile(
        fn,
        d1,
        d2,
        w.poles,
        order0=None if w.order0 is None else w.order0 + q,
        coef0=None if w.coef0 is None else c * w.coef0,
        order_inf=None if w.order_inf is None else w.order_inf + q,
        coef_inf=None if w.coef_inf is None else c * w.coef_inf,
        label=f"r^{q:g}*{w.label}",
        params=None,
    )
