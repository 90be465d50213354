"""Explicit geodesics of g(r^C0) = k r^(C0-2) dr^2 + r^C0 g_Y.

With a = rdot0/r0, q = g_Y(ydot0, ydot0)/k and F = (a^2 + q)/4,

    mu(t)    = 1 + C0 a t + C0^2 F t^2
    r(t)     = r0 mu(t)^(1/C0)            (C0 != 0)
    r(t)     = r0 exp(a t)                (C0 == 0)
    y(t)     = yhat(theta(t)),  theta(t) = int_0^t dtau / mu(tau)

where yhat is the fiber geodesic with yhat'(0) = ydot0.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainExceeded
from .fibers import FiberManifold
from .profiles import power
from .warped import WarpedMetric

ZERO_RTOL = 1e-12
DOMAIN_SHRINK = 1e-12


@dataclass(frozen=True)
class GeodesicInit:
    r0: float
    y0: np.ndarray
    rdot0: float
    ydot0: np.ndarray

    def __post_init__(self):
        y0 = np.atleast_1d(np.asarray(self.y0, dtype=float))
        yd = np.atleast_1d(np.asarray(self.ydot0, dtype=float))
        if y0.shape != yd.shape:
            raise ValueError("y0 and ydot0 must have the same dimension")
        if not (self.r0 > 0 and np.isfinite(self.r0) and np.isfinite(self.rdot0)):
            raise ValueError("r0 must be positive and finite")
        if not (np.all(np.isfinite(y0)) and np.all(np.isfinite(yd))):
            raise ValueError("initial data must be finite")
        object.__setattr__(self, "y0", y0)
        object.__setattr__(self, "ydot0", yd)


class ThetaBranch(str, enum.Enum):
    ARCTAN = "arctan"
    RATIONAL = "rational"
    ARCTANH = "arctanh"
    LOG = "log"
    IDENTITY = "identity"


def _fiber_speed(fiber: FiberManifold, init: GeodesicInit) -> float:
    gy = fiber.metric(init.y0)
    return float(init.ydot0 @ gy @ init.ydot0)


def _is_zero(x, scale) -> bool:
    return abs(x) < ZERO_RTOL * max(scale, 1e-300)


def _invariants(k, init: GeodesicInit, G):
    a = init.rdot0 / init.r0
    q = G / k
    F = 0.25 * (a * a + q)
    scale = a * a + abs(q)
    return a, q, F, scale


def theta_branch(k: float, init: GeodesicInit, G: float) -> ThetaBranch:
    a, q, F, scale = _invariants(k, init, G)
    if scale == 0.0 or _is_zero(F, scale):
        return ThetaBranch.IDENTITY if _is_zero(a, max(scale, 1.0)) or a == 0.0 else ThetaBranch.LOG
    if _is_zero(q, scale):
        return ThetaBranch.RATIONAL
    return ThetaBranch.ARCTAN if q > 0 else ThetaBranch.ARCTANH


def _mu_coeffs(C0, a, F):
    return C0 * C0 * F, C0 * a, 1.0


def t_domain_of(C0: float, a: float, F: float, branch: ThetaBranch, q: float = 0.0):
    """Maximal open interval around 0 where mu > 0 (shrunk slightly)."""
    if C0 == 0.0:
        return (-math.inf, math.inf)
    A, B, _ = _mu_coeffs(C0, a, F)
    if branch in (ThetaBranch.IDENTITY, ThetaBranch.LOG):
        if branch is ThetaBranch.IDENTITY or B == 0.0:
            return (-math.inf, math.inf)
        roots = [-1.0 / B]
    elif branch is ThetaBranch.ARCTAN:
        return (-math.inf, math.inf)
    elif branch is ThetaBranch.RATIONAL:
        roots = [-2.0 / B]
    else:
        # B^2 - 4A = -C0^2 q exactly; avoids cancellation near q = 0
        sq = abs(C0) * math.sqrt(-q)
        if B == 0.0:
            roots = [sq / (2 * A), -sq / (2 * A)]
        else:
            qq = -0.5 * (B + math.copysign(sq, B))
            roots = [qq / A, 1.0 / qq]
    lo, hi = -math.inf, math.inf
    for t in roots:
        if t > 0:
            hi = min(hi, t)
        elif t < 0:
            lo = max(lo, t)
    if math.isfinite(lo):
        lo = lo * (1 - DOMAIN_SHRINK)
    if math.isfinite(hi):
        hi = hi * (1 - DOMAIN_SHRINK)
    return (lo, hi)


def _theta(C0, a, q, F, branch, t):
    t = np.asarray(t, dtype=float)
    if C0 == 0.0 or branch is ThetaBranch.IDENTITY:
        return t.copy()
    if branch is ThetaBranch.LOG:
        return np.log1p(C0 * a * t) / (C0 * a)
    if branch is ThetaBranch.RATIONAL:
        return t / (1.0 + 0.5 * C0 * a * t)
    c = abs(C0)
    if branch is ThetaBranch.ARCTAN:
        sq = math.sqrt(q)
        # atan2 keeps the angle continuous across 2 + C0 a t = 0
        return 2.0 / (c * sq) * np.arctan2(c * sq * t, 2.0 + C0 * a * t)
    sq = math.sqrt(-q)
    return 2.0 / (c * sq) * np.arctanh(c * sq * t / (2.0 + C0 * a * t))


@dataclass(frozen=True)
class GeodesicPath:
    C0: float
    k: float
    init: GeodesicInit
    fiber: FiberManifold
    F: float
    G: float
    branch: ThetaBranch
    t_domain: tuple = field(default=(-math.inf, math.inf))

    @property
    def a(self) -> float:
        return self.init.rdot0 / self.init.r0

    @property
    def q(self) -> float:
        return self.G / self.k

    @property
    def t_max(self) -> float:
        return self.t_domain[1]

    @property
    def complete(self) -> bool:
        return self.t_domain == (-math.inf, math.inf)

    def check_domain(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.t_domain
        if np.any(t <= lo) or np.any(t >= hi):
            raise DomainExceeded(f"t outside the geodesic domain ({lo:.17g}, {hi:.17g})")

    def mu(self, t):
        t = np.asarray(t, dtype=float)
        C0 = self.C0
        return 1.0 + C0 * self.a * t + C0 * C0 * self.F * t * t

    def mu_dot(self, t):
        C0 = self.C0
        return C0 * self.a + 2.0 * C0 * C0 * self.F * np.asarray(t, dtype=float)

    def r(self, t):
        self.check_domain(t)
        t = np.asarray(t, dtype=float)
        if self.C0 == 0.0:
            return self.init.r0 * np.exp(self.a * t)
        return self.init.r0 * self.mu(t) ** (1.0 / self.C0)

    def rdot(self, t):
        t = np.asarray(t, dtype=float)
        if self.C0 == 0.0:
            return self.a * self.r(t)
        return self.r(t) * self.mu_dot(t) / (self.C0 * self.mu(t))

    def rddot(self, t):
        t = np.asarray(t, dtype=float)
        if self.C0 == 0.0:
            return self.a**2 * self.r(t)
        C0 = self.C0
        m, md = self.mu(t), self.mu_dot(t)
        mdd = 2.0 * C0 * C0 * self.F
        return self.r(t) / C0 * ((1.0 / C0 - 1.0) * md**2 / m**2 + mdd / m)

    def theta(self, t):
        self.check_domain(t)
        return _theta(self.C0, self.a, self.q, self.F, self.branch, t)

    def theta_dot(self, t):
        if self.C0 == 0.0:
            return np.ones_like(np.asarray(t, dtype=float))
        return 1.0 / self.mu(t)

    def fiber_state(self, t):
        """Fiber position and velocity y(t), ydot(t)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        th = self.theta(t)
        ys, vs = self.fiber.geodesic_path(self.init.y0, self.init.ydot0, th)
        return ys, vs * self.theta_dot(t)[:, None]

    def position(self, t):
        """Chart coordinates (r, y) at each t, shape (n, 1 + dim Y)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        ys, _ = self.fiber_state(t)
        return np.column_stack([self.r(t), ys])

    def velocity(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        _, vs = self.fiber_state(t)
        return np.column_stack([self.rdot(t), vs])

    def warped_metric(self) -> WarpedMetric:
        return WarpedMetric(self.k, power(self.C0), self.fiber)


def explicit_geodesic(k: float, C0: float, init: GeodesicInit, fiber: FiberManifold) -> GeodesicPath:
    if k == 0:
        raise ValueError("k must be nonzero")
    if init.y0.shape[0] != fiber.dim:
        raise ValueError("initial fiber data does not match the fiber dimension")
    G = _fiber_speed(fiber, init)
    a, q, F, _ = _invariants(k, init, G)
    branch = theta_branch(k, init, G)
    if branch is ThetaBranch.IDENTITY:
        F = 0.0
    dom = t_domain_of(float(C0), a, F, branch, q)
    return GeodesicPath(float(C0), float(k), init, fiber, F, G, branch, dom)


def theta_closed_form(k: float, C0: float, init: GeodesicInit, t, fiber: FiberManifold | None = None, G: float | None = None):
    """theta(t) = int_0^t dtau / mu(tau) in closed form.

    The fiber speed g_Y(ydot0, ydot0) is taken from ``G`` or computed on
    ``fiber``; with neither, the fiber is assumed Euclidean.
    """
    if C0 == 0:
        raise ValueError("C0 must be nonzero")
    if G is None:
        G = _fiber_speed(fiber, init) if fiber is not None else float(init.ydot0 @ init.ydot0)
    a, q, F, _ = _invariants(k, init, G)
    branch = theta_branch(k, init, G)
    if branch is ThetaBranch.IDENTITY:
        F = 0.0
    lo, hi = t_domain_of(float(C0), a, F, branch, q)
    tt = np.asarray(t, dtype=float)
    if np.any(tt <= lo) or np.any(tt >= hi):
        raise DomainExceeded("mu(t) <= 0")
    return _theta(float(C0), a, q, F, branch, tt)


@dataclass
class ConservationResiduals:
    e1_residual: float
    e2_residual: float
    ode_residual: float
    E1: float
    E2: float

    def max(self) -> float:
        return max(self.e1_residual, self.e2_residual, self.ode_residual)


def conservation_residuals(path: GeodesicPath, t) -> ConservationResiduals:
    """Max residuals of E1, the energy identity and the radial ODE over ``t``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    path.check_domain(t)
    W = path.warped_metric()
    init = path.init
    C0 = path.C0
    E1 = path.G * init.r0 ** (2 * C0)
    xi0 = W.xi(init.r0)
    E2 = float(xi0 * init.rdot0**2 + path.G * init.r0**C0)
    r, rd, rdd = path.r(t), path.rdot(t), path.rddot(t)
    ys, vs = path.fiber_state(t)
    gys = path.fiber.metric(ys)
    Gt = np.einsum("ni,nij,nj->n", vs, gys, vs)
    xi, dxi, rho, drho, _ = W.radial_terms(r)
    e1 = Gt * rho**4
    e2 = xi * rd**2 + E1 / rho**2
    ode = rdd + dxi / (2 * xi) * rd**2 - E1 * drho / (rho**3 * xi)
    return ConservationResiduals(
        float(np.max(np.abs(e1 - E1))),
        float(np.max(np.abs(e2 - E2))),
        float(np.max(np.abs(ode))),
        float(E1),
        E2,
    )


class Convexity(str, enum.Enum):
    CONVEX = "Convex"
    CONCAVE = "Concave"
    INDETERMINATE = "Indeterminate"


class FiberSign(str, enum.Enum):
    POSITIVE = "positive_definite_k_gY"
    NEGATIVE = "negative_definite_k_gY"
    OTHER = "other"


def fiber_sign(k: float, fiber: FiberManifold) -> FiberSign:
    sig = fiber.metric.signature
    if sig is None:
        return FiberSign.OTHER
    p, n = sig
    if n == 0:
        return FiberSign.POSITIVE if k > 0 else FiberSign.NEGATIVE
    if p == 0:
        return FiberSign.NEGATIVE if k > 0 else FiberSign.POSITIVE
    return FiberSign.OTHER


def radial_convexity(k: float, C0: float, fiber_signature) -> Convexity:
    """Sign of d^2 r/dt^2 along every geodesic of g(r^C0)."""
    fs = FiberSign(fiber_signature)
    if C0 == 0:
        return Convexity.CONVEX
    if 0 < C0 <= 2 and fs is FiberSign.POSITIVE:
        return Convexity.CONVEX
    if C0 < 0 and fs is FiberSign.NEGATIVE:
        return Convexity.CONVEX
    if C0 >= 2 and fs is FiberSign.NEGATIVE:
        return Convexity.CONCAVE
    return Convexity.INDETERMINATE
