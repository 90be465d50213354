"""Homogeneous pairs (g, f) on cones in R^n and their warped-product split.

The R_{>0}-action is the linear scaling m(lam, x) = lam x (the cone setting),
so the Euler field is P_x = x.  A pair of degree alpha satisfies

    lam^2 g(lam x) = lam^alpha g(x),   f(lam x) = lam^alpha f(x),   g(x) x = df_x.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (
    GeodesicState,
    MetricField,
    integrate_geodesic,
    riemann_fd,
    sectional_curvature_fd,
    signature_of,
)
from .csc import CscParams, csc_profile
from .errors import (
    AlphaOne,
    DegenerateHessian,
    DegeneratePlane,
    EmptyLevelSet,
    IllConditioned,
    NonHomogeneous,
    NotDefinite,
)
from .fibers import FiberManifold
from .geodesics import Convexity, GeodesicInit, explicit_geodesic
from .profiles import RadialProfile, times_power
from .warped import WarpedMetric

PAIR_RTOL = 1e-6
EULER_RTOL = 1e-8


def scaling_action(lam, x):
    return np.asarray(lam, dtype=float)[..., None] * np.asarray(x, dtype=float)


# --------------------------------------------------------------------------
# exact polynomials


@dataclass(frozen=True)
class Polynomial:
    """Sparse multivariate polynomial: sum_j c_j prod_i x_i^e_ji."""

    exps: np.ndarray
    coefs: np.ndarray

    def __post_init__(self):
        e = np.atleast_2d(np.asarray(self.exps, dtype=int))
        c = np.atleast_1d(np.asarray(self.coefs, dtype=float))
        if e.shape[0] != c.shape[0]:
            raise ValueError("one coefficient per monomial")
        if np.any(e < 0):
            raise ValueError("exponents must be nonnegative")
        keep = c != 0.0
        object.__setattr__(self, "exps", e[keep] if np.any(keep) else np.zeros((0, e.shape[1]), int))
        object.__setattr__(self, "coefs", c[keep])

    @classmethod
    def from_terms(cls, nvars, terms):
        """``terms`` is an iterable of (coef, exponent tuple)."""
        terms = list(terms)
        if not terms:
            return cls(np.zeros((0, nvars), int), np.zeros(0))
        return cls(np.array([t[1] for t in terms], int), np.array([t[0] for t in terms], float))

    @property
    def nvars(self) -> int:
        return self.exps.shape[1]

    @property
    def degrees(self):
        return self.exps.sum(axis=1)

    def homogeneous_degree(self) -> Optional[int]:
        d = np.unique(self.degrees)
        return int(d[0]) if d.size == 1 else None

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.coefs.size == 0:
            return np.zeros(x.shape[:-1])
        mons = np.prod(x[..., None, :] ** self.exps, axis=-1)
        return mons @ self.coefs

    def diff(self, i: int) -> "Polynomial":
        e = self.exps.copy()
        c = self.coefs * e[:, i]
        e[:, i] = np.maximum(e[:, i] - 1, 0)
        return Polynomial(e, c)

    @functools.cached_property
    def _grad(self):
        return [self.diff(i) for i in range(self.nvars)]

    @functools.cached_property
    def _hess(self):
        return [[gi.diff(j) for j in range(self.nvars)] for gi in self._grad]

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        return np.stack([p(x) for p in self._grad], axis=-1)

    def hess(self, x):
        x = np.asarray(x, dtype=float)
        rows = [np.stack([p(x) for p in row], axis=-1) for row in self._hess]
        return np.stack(rows, axis=-2)

    def to_terms(self):
        return [(float(c), [int(v) for v in e]) for c, e in zip(self.coefs, self.exps)]

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(np.vstack([self.exps, other.exps]), np.concatenate([self.coefs, other.coefs]))

    def embed(self, nvars: int, offset: int) -> "Polynomial":
        e = np.zeros((self.exps.shape[0], nvars), int)
        e[:, offset : offset + self.nvars] = self.exps
        return Polynomial(e, self.coefs)


# --------------------------------------------------------------------------
# pairs


@dataclass(frozen=True)
class HomogeneousPair:
    """A pair (g, f) of degree alpha on an open cone of R^n.

    ``domain`` returns a signed margin (positive inside); ``probe`` is a point
    inside the domain used for sampling and signature probes.
    """

    dim: int
    alpha: float
    f: Callable
    grad_f: Callable
    g: MetricField
    probe: np.ndarray
    domain: Optional[Callable] = None
    action: Callable = scaling_action
    name: str = "pair"
    meta: dict = field(default_factory=dict)

    def euler_field(self, x):
        """P_x = d/dt m(e^t, x) at t = 0 by central differences of the action."""
        x = np.asarray(x, dtype=float)
        if self.action is scaling_action:
            return x.copy()
        h = 1e-5
        return (self.action(math.exp(h), x) - self.action(math.exp(-h), x)) / (2 * h)

    def inside(self, x) -> bool:
        if self.domain is None:
            return bool(self.f(x) > 0)
        return bool(self.domain(np.asarray(x, float)) > 0)

    def sample(self, rng, n=1, spread=0.15, scale_range=(0.5, 2.0)):
        """Random interior points near the ray through the probe."""
        base = np.asarray(self.probe, dtype=float)
        nb = np.linalg.norm(base)
        out = []
        tries = 0
        while len(out) < n:
            tries += 1
            if tries > 10000 * max(n, 1):
                raise EmptyLevelSet("could not sample interior points of the pair domain")
            p = base / nb + spread * rng.normal(size=self.dim) / math.sqrt(self.dim)
            p = p * nb * math.exp(rng.uniform(*np.log(scale_range)))
            if self.inside(p):
                out.append(p)
        return np.array(out)

    def signature(self, x=None):
        x = self.probe if x is None else x
        return signature_of(self.g(x))


def _norm(a):
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


@dataclass
class PairReport:
    passed: bool
    homog_g: float
    homog_f: float
    euler: float
    df_P: float

    def to_dict(self):
        return {
            "pass": self.passed,
            "homog_g_residual": self.homog_g,
            "homog_f_residual": self.homog_f,
            "thm_assump_residual": self.euler,
            "dfP_residual": self.df_P,
        }


def _action_jacobian(P: HomogeneousPair, lam, x):
    if P.action is scaling_action:
        return lam * np.eye(P.dim)
    h = 1e-6 * max(1.0, _norm(x))
    cols = [(P.action(lam, x + h * e) - P.action(lam, x - h * e)) / (2 * h) for e in np.eye(P.dim)]
    return np.stack(cols, axis=1)


def verify_pair(P: HomogeneousPair, n_samples: int = 20, rng=None, tol: float = PAIR_RTOL) -> PairReport:
    rng = np.random.default_rng(0) if rng is None else rng
    xs = P.sample(rng, n_samples)
    lams = np.exp(rng.uniform(-1.0, 1.0, size=n_samples))
    rg = rf = re = rp = 0.0
    a = P.alpha
    for x, lam in zip(xs, lams):
        J = _action_jacobian(P, lam, x)
        mx = P.action(lam, x)
        gx = P.g(x)
        lhs = J.T @ P.g(mx) @ J
        rg = max(rg, _norm(lhs - lam**a * gx) / max(_norm(lam**a * gx), 1e-300))
        fx = float(P.f(x))
        rf = max(rf, abs(float(P.f(mx)) - lam**a * fx) / abs(lam**a * fx))
        Px = P.euler_field(x)
        df = P.grad_f(x)
        re = max(re, _norm(gx @ Px - df) / max(_norm(df), 1e-300))
        rp = max(rp, abs(float(df @ Px) - a * fx) / abs(a * fx))
    return PairReport(bool(max(rg, rf, re, rp) < tol), rg, rf, re, rp)


# --------------------------------------------------------------------------
# level sets and the split


@dataclass(frozen=True)
class LevelChart:
    """Chart u in R^(n-1) of M_l = f^{-1}(l) through the slice x_hat + E u.

    x(u) = s(u) y(u) with y(u) = x_hat + E u and s = (l / f(y))^(1/alpha).
    """

    pair: HomogeneousPair
    l: float
    x_hat: np.ndarray
    E: np.ndarray

    @property
    def dim(self) -> int:
        return self.pair.dim - 1

    def _y(self, u):
        return self.x_hat + np.asarray(u, dtype=float) @ self.E.T

    def embed(self, u):
        y = self._y(u)
        fy = self.pair.f(y)
        s = (self.l / fy) ** (1.0 / self.pair.alpha)
        return s[..., None] * y

    def jacobian(self, u):
        """dx/du, shape (..., n, n-1)."""
        P = self.pair
        y = self._y(u)
        fy = P.f(y)
        s = (self.l / fy) ** (1.0 / P.alpha)
        gs = -(s / (P.alpha * fy))[..., None] * (P.grad_f(y) @ self.E)
        return s[..., None, None] * self.E + y[..., :, None] * gs[..., None, :]

    def inverse(self, x):
        x = np.asarray(x, dtype=float)
        y = x / (x @ self.x_hat)[..., None]
        return y @ self.E

    def metric_fn(self, u):
        x = self.embed(u)
        J = self.jacobian(u)
        return np.swapaxes(J, -1, -2) @ self.pair.g(x) @ J

    def margin(self, u):
        y = self._y(u)
        fy = float(self.pair.f(y))
        if not fy > 0:
            return -1.0
        x = self.embed(u)
        if self.pair.domain is None:
            return fy
        return float(self.pair.domain(x))

    def metric_field(self) -> MetricField:
        u0 = np.zeros(self.dim)
        sig = signature_of(self.metric_fn(u0)) if self.dim else (0, 0)
        return MetricField(self.dim, self.metric_fn, signature=sig, domain=self.margin, name=f"{self.pair.name}_level{self.l:g}")

    def fiber(self) -> FiberManifold:
        m = self.metric_field()

        def sampler(rng, n):
            out = []
            while len(out) < n:
                u = rng.uniform(-0.1, 0.1, size=self.dim)
                if self.margin(u) > 0:
                    out.append(u)
            return np.array(out)

        return FiberManifold(self.dim, m, None, m.name, None, sampler)


def level_chart(P: HomogeneousPair, l: float, through=None) -> LevelChart:
    ref = np.asarray(P.probe if through is None else through, dtype=float)
    if not P.inside(ref):
        raise EmptyLevelSet("reference point is outside the pair domain")
    x_hat = ref / np.linalg.norm(ref)
    if not float(P.f(x_hat)) > 0:
        raise EmptyLevelSet("f is not positive on the reference ray")
    if not l > 0:
        raise EmptyLevelSet("level must be positive")
    q, _ = np.linalg.qr(np.column_stack([x_hat, np.eye(P.dim)]))
    E = q[:, 1 : P.dim]
    # fix column signs so the basis is deterministic
    piv = E[np.argmax(np.abs(E), axis=0), np.arange(E.shape[1])]
    E = E * np.where(piv < 0, -1.0, 1.0)
    return LevelChart(P, float(l), x_hat, E)


@dataclass(frozen=True)
class SplitResult:
    W: WarpedMetric
    chart: LevelChart
    v: RadialProfile
    l: float

    @property
    def alpha(self):
        return self.chart.pair.alpha

    def psi(self, r, u):
        """(r, u) -> m((r/l)^(1/alpha), x(u))."""
        lam = (np.asarray(r, dtype=float) / self.l) ** (1.0 / self.alpha)
        return self.chart.pair.action(lam, self.chart.embed(u))

    def psi_chart(self, z):
        """psi on the stacked coordinate z = (r, u)."""
        z = np.asarray(z, dtype=float)
        return self.psi(z[..., 0], z[..., 1:])

    def psi_inv(self, x):
        x = np.asarray(x, dtype=float)
        P = self.chart.pair
        fx = np.asarray(P.f(x))
        y = P.action((self.l / fx) ** (1.0 / P.alpha), x)
        return np.concatenate([fx[..., None], self.chart.inverse(y)], axis=-1)

    def psi_jacobian(self, r, u):
        r = float(r)
        lam = (r / self.l) ** (1.0 / self.alpha)
        x = self.chart.embed(u)
        col_r = lam / (self.alpha * r) * x
        return np.column_stack([col_r, lam * self.chart.jacobian(u)])

    def pullback_residual(self, r, u) -> float:
        """Relative gap between psi^*((v o f) g) and the warped block form."""
        P = self.chart.pair
        J = self.psi_jacobian(r, u)
        x = self.psi(r, u)
        lhs = float(self.v(P.f(x))) * (J.T @ P.g(x) @ J)
        z = np.concatenate([[r], u])
        from .warped import as_metric_field

        rhs = as_metric_field(self.W)(z)
        return _norm(lhs - rhs) / max(_norm(rhs), 1e-300)


def split(P: HomogeneousPair, l: float, v: RadialProfile, through=None) -> SplitResult:
    chart = level_chart(P, l, through)
    w = times_power(v, 1.0, 1.0 / l)
    W = WarpedMetric(l / P.alpha, w, chart.fiber())
    return SplitResult(W, chart, v, float(l))


def conformal_metric(P: HomogeneousPair, v: RadialProfile, g: MetricField | None = None) -> MetricField:
    """The metric (v o f) g on the pair domain."""
    base = P.g if g is None else g

    def fn(x):
        return np.asarray(v(P.f(x)))[..., None, None] * base(x)

    dom = P.domain if P.domain is not None else (lambda x: float(P.f(x)))
    return MetricField(P.dim, fn, signature=base.signature, domain=dom, name=f"({v.label})*{base.name}")


# --------------------------------------------------------------------------
# hat metric


@dataclass
class SignatureReport:
    alpha: float
    g_signature: tuple
    ghat_signature: tuple
    signature_case: str
    consistent: bool

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "g_signature": list(self.g_signature),
            "ghat_signature": list(self.ghat_signature),
            "signature_case": self.signature_case,
            "consistent": self.consistent,
        }


def _signature_case(alpha, n, sg, sh):
    if alpha > 1:
        return "alpha>1", (sg == (1, n - 1)) == (sh == (n, 0))
    if 0 < alpha < 1:
        return "0<alpha<1", (sg == (n, 0)) == (sh == (n, 0))
    return "alpha<0", (sg == (0, n)) == (sh == (0, n))


def hat_metric_field(P: HomogeneousPair, sign: float = 1.0) -> MetricField:
    a = P.alpha

    def fn(x):
        df = P.grad_f(x)
        fx = np.asarray(P.f(x))
        return sign * df[..., :, None] * df[..., None, :] / fx[..., None, None] + (1.0 - a) * P.g(x)

    sig = signature_of(fn(np.asarray(P.probe, float)))
    return MetricField(P.dim, fn, signature=sig, domain=P.domain, name=f"hat({P.g.name})")


def hat_metric(P: HomogeneousPair):
    """Return the pair (g_hat, f) and a signature report."""
    if P.alpha == 1:
        raise AlphaOne("hat metric needs alpha != 1")
    if P.alpha == 0:
        raise AlphaOne("hat metric needs alpha != 0")
    gh = hat_metric_field(P)
    Q = HomogeneousPair(P.dim, P.alpha, P.f, P.grad_f, gh, P.probe, P.domain, P.action, f"hat({P.name})", dict(P.meta))
    sg = P.signature()
    sh = gh.signature
    case, ok = _signature_case(P.alpha, P.dim, sg, sh)
    return Q, SignatureReport(P.alpha, sg, sh, case, bool(ok))


# --------------------------------------------------------------------------
# conformal constant-curvature profiles


def suggest_v(P: HomogeneousPair, C: float, level_csc: float | None = None, C2: float = 0.0, l: float = 1.0, C1: float | None = None, branch_sign: int = 1) -> RadialProfile:
    """v(r) = w(C/alpha, l*C_l/alpha, C2, r) / r.

    For dim M = 2 the level set is one-dimensional; pass ``C1`` directly.
    """
    if C1 is None:
        if level_csc is None:
            raise ValueError("give level_csc or C1")
        C1 = l * level_csc / P.alpha
    w = csc_profile(CscParams(C / P.alpha, C1, C2, branch_sign))
    return times_power(w, -1.0)


def flat_level_csc(P: HomogeneousPair, l: float) -> float:
    """K^{g_l} for flat g: alpha / (4 l)."""
    return P.alpha / (4.0 * l)


# --------------------------------------------------------------------------
# curvature relation on level sets


@dataclass
class RelationReport:
    passed: bool
    max_residual: float
    mode: str
    level_K: list
    tol: float

    def to_dict(self):
        return {"pass": self.passed, "max_residual": self.max_residual, "mode": self.mode, "tol": self.tol, "level_K_samples": self.level_K}


def level_curvature_relation(P: HomogeneousPair, l: float = 1.0, n_samples: int = 10, rng=None, tol: float = 1e-4) -> RelationReport:
    """Check K^g(a, b) = (l/r)(K^{g_l}(a, b) - alpha/(4l)) on fiber planes.

    For dim M = 2 there are no fiber planes; ambient flatness is checked instead.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    if P.dim == 2:
        worst = 0.0
        for x in P.sample(rng, n_samples):
            worst = max(worst, _norm(riemann_fd(P.g, x)))
        return RelationReport(bool(worst < tol), worst, "ambient-flatness", [], tol)
    sp = split(P, l, _unit_profile())
    gl = sp.chart.metric_field()
    worst = 0.0
    lk = []
    for _ in range(n_samples):
        u = sp.chart.fiber().sample(rng, 1)[0]
        r = float(np.exp(rng.uniform(np.log(0.5), np.log(2.0))) * l)
        a, b = rng.normal(size=(2, P.dim - 1))
        try:
            kl = sectional_curvature_fd(gl, u, a, b)
            lam = (r / l) ** (1.0 / P.alpha)
            J = sp.chart.jacobian(u)
            kg = sectional_curvature_fd(P.g, sp.psi(r, u), lam * J @ a, lam * J @ b)
        except (DegeneratePlane, IllConditioned):
            continue
        lk.append(kl)
        pred = (l / r) * (kl - P.alpha / (4 * l))
        worst = max(worst, abs(kg - pred) / max(1.0, abs(pred)))
    return RelationReport(bool(worst < tol), worst, "fiber-planes", lk, tol)


def _unit_profile():
    from .profiles import constant

    return constant(1.0)


# --------------------------------------------------------------------------
# pair geodesics and convexity


@dataclass(frozen=True)
class PairGeodesic:
    pair: HomogeneousPair
    beta: float
    l: float
    path: object
    chart: LevelChart

    @property
    def t_domain(self):
        return self.path.t_domain

    def r(self, t):
        return self.path.r(t)

    def __call__(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        r = self.path.r(t)
        ys, _ = self.path.fiber_state(t)
        lam = (r / self.l) ** (1.0 / self.pair.alpha)
        return lam[:, None] * self.chart.embed(ys)


def pair_geodesic(P: HomogeneousPair, beta: float, x0, A) -> PairGeodesic:
    """Geodesic of f^beta g from x0 with velocity A, through the split."""
    x0 = np.asarray(x0, dtype=float)
    A = np.asarray(A, dtype=float)
    l = float(P.f(x0))
    chart = level_chart(P, l, through=x0)
    u0 = chart.inverse(x0)
    dfA = float(P.grad_f(x0) @ A)
    tang = A - dfA / (P.alpha * l) * P.euler_field(x0)
    J = chart.jacobian(u0)
    udot, *_ = np.linalg.lstsq(J, tang, rcond=None)
    init = GeodesicInit(l, u0, dfA, udot)
    path = explicit_geodesic(l / P.alpha, beta + 1.0, init, chart.fiber())
    return PairGeodesic(P, float(beta), l, path, chart)


def level_definiteness(P: HomogeneousPair, l: float | None = None) -> str:
    """Sign of alpha * g_l at the probe: 'positive', 'negative' or 'other'."""
    l = float(P.f(P.probe)) if l is None else l
    chart = level_chart(P, l)
    if chart.dim == 0:
        return "other"
    ev = np.linalg.eigvalsh(P.alpha * chart.metric_fn(np.zeros(chart.dim)))
    if np.all(ev > 0):
        return "positive"
    if np.all(ev < 0):
        return "negative"
    return "other"


def f_convexity(P: HomogeneousPair, beta: float, definiteness: str | None = None) -> Convexity:
    d = level_definiteness(P) if definiteness is None else definiteness
    if beta == -1:
        return Convexity.CONVEX
    if -1 < beta <= 1 and d == "positive":
        return Convexity.CONVEX
    if beta < -1 and d == "negative":
        return Convexity.CONVEX
    if beta >= 1 and d == "negative":
        return Convexity.CONCAVE
    return Convexity.INDETERMINATE


# --------------------------------------------------------------------------
# pseudo-Hessian cones


@dataclass(frozen=True)
class Potential:
    name: str
    poly: Polynomial
    alpha: float
    probe: np.ndarray

    @property
    def dim(self):
        return self.poly.nvars


def quadratic(n: int) -> Potential:
    terms = [(1.0, [2 if j == i else 0 for j in range(n)]) for i in range(n)]
    return Potential(f"quadratic{n}", Polynomial.from_terms(n, terms), 2.0, np.ones(n) / math.sqrt(n))


def lorentz_quadratic(n: int = 3) -> Potential:
    """x0^2 - x1^2 - ... on the future cone; Hessian of signature (1, n-1)."""
    terms = [(1.0 if i == 0 else -1.0, [2 if j == i else 0 for j in range(n)]) for i in range(n)]
    probe = np.zeros(n)
    probe[0] = 1.0
    return Potential(f"lorentz{n}", Polynomial.from_terms(n, terms), 2.0, probe)


DEFAULT_2D_FACTORS = (
    # x^3 + y^3: Hessian diag(6x, 6y), positive definite on the open quadrant
    [(1.0, (3, 0)), (1.0, (0, 3))],
    # x^3 + 3 x y^2: Hessian [[6x, 6y], [6y, 6x]], positive definite for x > |y|
    [(1.0, (3, 0)), (3.0, (1, 2))],
)


def product2d(factors=DEFAULT_2D_FACTORS, probe=None) -> Potential:
    """f = f_1(x1, x2) + f_2(x3, x4) + ... with 2-variable factors of one degree."""
    polys = [Polynomial.from_terms(2, fac) if not isinstance(fac, Polynomial) else fac for fac in factors]
    degs = {p.homogeneous_degree() for p in polys}
    if len(degs) != 1 or None in degs:
        raise NonHomogeneous("factors must be homogeneous of one common degree")
    n = 2 * len(polys)
    total = polys[0].embed(n, 0)
    for i, p in enumerate(polys[1:], start=1):
        total = total + p.embed(n, 2 * i)
    if probe is None:
        probe = np.tile([1.0, 0.2], len(polys))
    return Potential("product2d", total, float(degs.pop()), np.asarray(probe, float))


def maschke_polynomial() -> Polynomial:
    terms = [(1.0, (6, 0, 0)), (1.0, (0, 6, 0)), (1.0, (0, 0, 6))]
    terms += [(-10.0, (3, 3, 0)), (-10.0, (0, 3, 3)), (-10.0, (3, 0, 3))]
    return Polynomial.from_terms(3, terms)


@functools.lru_cache(maxsize=None)
def maschke_probe(seed: int = 0, n_random: int = 20000) -> tuple:
    """A unit vector where the Maschke Hessian is positive definite and f > 0.

    Random search on the sphere, refined by hill climbing on the smallest
    Hessian eigenvalue.
    """
    poly = maschke_polynomial()
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(n_random, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)

    def score(p):
        ev = np.linalg.eigvalsh(poly.hess(p))
        fv = poly(p)
        return np.where(fv > 0, ev[..., 0], -np.inf)

    s = score(pts)
    best = pts[int(np.argmax(s))]
    best_s = float(score(best))
    step = 0.05
    while step > 1e-6:
        moved = False
        for _ in range(20):
            cand = best + step * rng.normal(size=3)
            cand /= np.linalg.norm(cand)
            cs = float(score(cand))
            if cs > best_s:
                best, best_s, moved = cand, cs, True
        if not moved:
            step *= 0.5
    return tuple(float(c) for c in best)


def maschke() -> Potential:
    return Potential("maschke", maschke_polynomial(), 6.0, np.array(maschke_probe()))


def user_polynomial(terms, nvars: int, probe, alpha: float | None = None, name: str = "user") -> Potential:
    poly = Polynomial.from_terms(nvars, terms)
    deg = poly.homogeneous_degree()
    if alpha is None:
        if deg is None:
            raise NonHomogeneous("polynomial is not homogeneous")
        alpha = float(deg)
    return Potential(name, poly, float(alpha), np.asarray(probe, float))


def _hessian_domain(poly: Polynomial, alpha: float, sig0):
    def margin(x):
        x = np.asarray(x, dtype=float)
        nx = np.linalg.norm(x)
        if nx == 0:
            return -1.0
        fx = float(poly(x)) / nx**alpha
        H = poly.hess(x) / nx ** (alpha - 2)
        ev = np.linalg.eigvalsh(H)
        sig = (int(np.sum(ev > 0)), int(np.sum(ev < 0)))
        if sig != sig0:
            return -float(np.min(np.abs(ev)))
        return min(fx, float(np.min(np.abs(ev))))

    return margin


def hessian_cone_pair(pot: Potential, probe=None):
    """(Ddf/(alpha-1), f) and (-f Dd log f, f) for the flat connection on R^n."""
    probe = np.asarray(pot.probe if probe is None else probe, dtype=float)
    a = float(pot.alpha)
    if a in (0.0, 1.0):
        raise AlphaOne("Hessian pairs need alpha not in {0, 1}")
    poly = pot.poly
    H0 = poly.hess(probe)
    ev = np.linalg.eigvalsh(H0)
    if np.min(np.abs(ev)) < 1e-10 * max(1.0, np.max(np.abs(ev))):
        raise DegenerateHessian(f"Hessian of {pot.name} is degenerate at the probe")
    f0 = float(poly(probe))
    if not f0 > 0:
        raise DegenerateHessian(f"{pot.name} is not positive at the probe")
    euler = abs(float(poly.grad(probe) @ probe) - a * f0)
    if euler > EULER_RTOL * abs(f0):
        raise NonHomogeneous(f"Euler identity fails for {pot.name}: residual {euler:.3g}")
    sig0 = (int(np.sum(ev > 0)), int(np.sum(ev < 0)))
    dom = _hessian_domain(poly, a, sig0)

    def g_fn(x):
        return poly.hess(x) / (a - 1.0)

    def gh_fn(x):
        fx = np.asarray(poly(x))
        df = poly.grad(x)
        return -poly.hess(x) + df[..., :, None] * df[..., None, :] / fx[..., None, None]

    g = MetricField(pot.dim, g_fn, signature=signature_of(g_fn(probe)), domain=dom, name=f"hess({pot.name})")
    gh = MetricField(pot.dim, gh_fn, signature=signature_of(gh_fn(probe)), domain=dom, name=f"-fDdlog({pot.name})")
    meta = {"potential": pot.name, "terms": poly.to_terms(), "nvars": pot.dim}
    P = HomogeneousPair(pot.dim, a, poly, poly.grad, g, probe, dom, scaling_action, f"hess_{pot.name}", meta)
    Q = HomogeneousPair(pot.dim, a, poly, poly.grad, gh, probe, dom, scaling_action, f"hesshat_{pot.name}", meta)
    return P, Q


# --------------------------------------------------------------------------
# isometries and curvature corollaries


@dataclass
class IsometryReport:
    passed: bool
    max_residual: float
    tol: float

    def to_dict(self):
        return {"pass": self.passed, "max_residual": self.max_residual, "tol": self.tol}


def fd_jacobian(fn, x, h=None):
    x = np.asarray(x, dtype=float)
    h = np.finfo(float).eps ** (1 / 3) * max(1.0, _norm(x)) if h is None else h
    cols = [(fn(x + h * e) - fn(x - h * e)) / (2 * h) for e in np.eye(x.size)]
    return np.stack(cols, axis=1)


def isometry_check(mapping, g_src: MetricField, g_dst: MetricField, points, tol: float = 1e-5) -> IsometryReport:
    worst = 0.0
    for x in np.atleast_2d(points):
        J = fd_jacobian(mapping, x)
        lhs = J.T @ g_dst(mapping(x)) @ J
        rhs = g_src(x)
        worst = max(worst, _norm(lhs - rhs) / max(_norm(rhs), 1e-300))
    return IsometryReport(bool(worst < tol), worst, tol)


def inversion_map(P: HomogeneousPair):
    """psi_M(x) = m(f(x)^(-2/alpha), x)."""

    def psi_M(x):
        return P.action(np.asarray(P.f(x)) ** (-2.0 / P.alpha), x)

    return psi_M


def inversion_dual_profile(v: RadialProfile) -> RadialProfile:
    """r -> v(1/r) / r^2, the profile paired with v by psi_M."""
    from .profiles import inverted

    return times_power(inverted(v), -2.0)


@dataclass
class BoundReport:
    passed: bool
    mode: str
    expected: str
    C: float
    min_K: float
    max_K: float
    slack: float
    level_hypothesis: Optional[str] = None
    note: str = ""

    def to_dict(self):
        return {
            "pass": self.passed,
            "mode": self.mode,
            "expected": self.expected,
            "C": self.C,
            "min_K": self.min_K,
            "max_K": self.max_K,
            "slack": self.slack,
            "level_hypothesis": self.level_hypothesis,
            "note": self.note,
        }


@dataclass(frozen=True)
class BoundHess:
    C: float
    C1: float
    C2: float = 0.0
    branch_sign: int = 1


@dataclass(frozen=True)
class BoundLogFlat:
    beta: float


def _definite(sig, n):
    return sig in ((n, 0), (0, n))


def _sample_K(metric: MetricField, pts, rng, planes_per_point=2):
    ks = []
    for x in pts:
        for _ in range(planes_per_point):
            a, b = rng.normal(size=(2, metric.dim))
            try:
                ks.append(sectional_curvature_fd(metric, x, a, b))
            except (DegeneratePlane, IllConditioned):
                pass
    return np.array(ks)


def curvature_bound_corollaries(P: HomogeneousPair, mode, n_samples: int = 10, rng=None, slack: float = 1e-6) -> BoundReport:
    rng = np.random.default_rng(0) if rng is None else rng
    n = P.dim
    if isinstance(mode, BoundHess):
        if not _definite(P.signature(), n):
            raise NotDefinite("BoundHess needs a definite g")
        v = suggest_v(P, mode.C, C1=mode.C1, C2=mode.C2, branch_sign=mode.branch_sign)
        l = float(P.f(P.probe))
        if n == 2:
            expected, hyp = "==", "dim 2: every plane contains the radial direction"
        else:
            sp = split(P, l, _unit_profile())
            gl = sp.chart.metric_field()
            lk = l * _sample_K(gl, sp.chart.fiber().sample(rng, n_samples), rng)
            target = P.alpha * mode.C1
            if np.all(np.abs(lk - target) < 1e-6 * max(1, abs(target))):
                expected = "=="
            elif np.all(lk >= target - 1e-9):
                expected = ">="
            elif np.all(lk <= target + 1e-9):
                expected = "<="
            else:
                expected = "none"
            hyp = f"l*K_l in [{lk.min():.6g}, {lk.max():.6g}] vs alpha*C1 = {target:.6g}"
        metric = conformal_metric(P, v)
        pts = [x for x in P.sample(rng, n_samples) if _off_poles(v, float(P.f(x)))]
        ks = _sample_K(metric, pts, rng)
        C = mode.C
        s = slack * max(1.0, abs(C))
        ok = {
            "==": bool(np.all(np.abs(ks - C) <= s)),
            ">=": bool(np.all(ks >= C - s)),
            "<=": bool(np.all(ks <= C + s)),
            "none": True,
        }[expected]
        return BoundReport(ok, "BoundHess", expected, C, float(ks.min()), float(ks.max()), s, hyp)
    if isinstance(mode, BoundLogFlat):
        if not P.alpha > 1:
            raise NotDefinite("BoundLogFlat needs alpha > 1")
        Q, rep = hat_metric(P)
        if not _definite(rep.ghat_signature, n):
            raise NotDefinite(f"g_hat has signature {rep.ghat_signature}; BoundLogFlat needs it definite")
        pts = P.sample(rng, n_samples)
        kg = _sample_K(P.g, pts, rng)
        if np.any(kg < -1e-6):
            raise NotDefinite("hypothesis K^g >= 0 fails at sampled planes")
        from .profiles import power

        metric = conformal_metric(P, power(mode.beta), Q.g)
        ks = _sample_K(metric, pts, rng)
        ok = bool(np.all(ks <= slack))
        return BoundReport(ok, "BoundLogFlat", "<=", 0.0, float(ks.min()), float(ks.max()), slack, f"min K^g sampled {kg.min():.3g}")
    raise ValueError(f"unknown mode {mode!r}")


def _off_poles(v: RadialProfile, r: float) -> bool:
    if not v.has_poles:
        return True
    ps = np.atleast_1d(v.poles(r / 1.5, r * 1.5))
    return not (ps.size and np.min(np.abs(np.log(r / ps))) < 0.05)


def ode_pair_geodesic(P: HomogeneousPair, beta: float, x0, A, t_end: float, tol: float = 1e-10, n_samples: int = 64):
    """Oracle: integrate the geodesic equation of f^beta g directly."""
    from .profiles import power

    metric = conformal_metric(P, power(beta))
    return integrate_geodesic(metric, GeodesicState(np.asarray(x0, float), np.asarray(A, float)), t_end, tol=tol, n_samples=n_samples)
