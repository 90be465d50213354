"""The radial distance T(r) and the four-case completion classifier.

k-mode:  T(r) = int_{R0}^r sqrt(k w(q)) / q dq
v-mode:  T(r) = int_{R0}^r sqrt(v(q) / q) dq

Quadrature runs in x = log q, where both integrands become sqrt(k w(e^x))
and sqrt(v(e^x) e^x) respectively.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .errors import HypothesisNotMet, Inconclusive, NegativeAlpha, NotPositiveDefinite, PoleInDomain
from .profiles import RadialProfile, power
from .warped import WarpedMetric

MAX_BRACKETS = 40
CAUCHY_TOL = 1e-8
DIVERGE_LEVEL = 1e8
RATIO_STABLE = 1e-3
RATIO_ONE = 1e-6
QUAD_TOL = 1e-11
W_PROBES_0 = (1e-4, 1e-6, 1e-8)
W_PROBES_INF = (1e4, 1e6, 1e8)
W_ZERO_LEVEL = 1e-6
X_SAFE = 600.0


@dataclass(frozen=True)
class TTransform:
    profile: RadialProfile
    mode: str = "k"
    k: float = 1.0
    R0: float = 1.0

    def __post_init__(self):
        if self.mode not in ("k", "v"):
            raise ValueError("mode must be 'k' or 'v'")
        if self.mode == "k" and not self.k > 0:
            raise NotPositiveDefinite("the T-transform needs k > 0")
        if not self.R0 > 0:
            raise ValueError("R0 must be positive")

    def integrand_log(self, x):
        """Integrand in x = log q."""
        if abs(x) > X_SAFE:
            # beyond double range of q: use the tagged power asymptotics
            pr = self.profile
            order, coef = (pr.order0, pr.coef0) if x < 0 else (pr.order_inf, pr.coef_inf)
            if order is not None:
                e = order if self.mode == "k" else order + 1.0
                scale = self.k if self.mode == "k" else 1.0
                return math.sqrt(scale * coef) * math.exp(0.5 * e * x)
            x = math.copysign(X_SAFE, x)
        q = math.exp(x)
        if self.mode == "k":
            return math.sqrt(self.k * float(self.profile.fn(q)))
        return math.sqrt(float(self.profile.fn(q)) * q)

    @property
    def exponent0(self) -> Optional[float]:
        """Exponent e with integrand ~ exp(e x / 2) as x -> -inf."""
        p = self.profile.order0
        if p is None:
            return None
        return p if self.mode == "k" else p + 1.0

    @property
    def exponent_inf(self) -> Optional[float]:
        p = self.profile.order_inf
        if p is None:
            return None
        return p if self.mode == "k" else p + 1.0

    def _segment(self, a, b):
        val, err = quad(self.integrand_log, a, b, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
        return val, err

    def __call__(self, r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        x0 = math.log(self.R0)
        out = np.array([self._segment(x0, math.log(q))[0] for q in r])
        return out if out.size > 1 else float(out[0])

    def with_error(self, r):
        return self._segment(math.log(self.R0), math.log(r))

    @property
    def w_profile(self) -> RadialProfile:
        """Profile whose limits enter the classification: w, or r v in v-mode."""
        if self.mode == "k":
            return self.profile
        from .profiles import times_power

        return times_power(self.profile, 1.0)


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


class Finiteness(str, enum.Enum):
    FINITE = "finite"
    INFINITE = "infinite"
    INCONCLUSIVE = "inconclusive"


class WLimit(str, enum.Enum):
    ZERO = "zero"
    NONZERO = "nonzero"
    UNKNOWN = "unknown"


@dataclass
class EndBehavior:
    kind: Finiteness
    value: Optional[float] = None
    error: Optional[float] = None
    method: str = ""

    def to_dict(self):
        return {"kind": self.kind.value, "value": _num(self.value), "error": _num(self.error), "method": self.method}


@dataclass
class LimitBehavior:
    T0: EndBehavior
    Tinf: EndBehavior
    w_limit_0: WLimit
    w_limit_inf: WLimit

    def to_dict(self):
        return {
            "T0": self.T0.to_dict(),
            "Tinf": self.Tinf.to_dict(),
            "w_limit_0": self.w_limit_0.value,
            "w_limit_inf": self.w_limit_inf.value,
        }


def _exponent_end(T: TTransform, e: float, side: str) -> EndBehavior:
    # integrand ~ exp(e x / 2): finite towards -inf iff e > 0, towards +inf iff e < 0
    finite = e > 0 if side == "0" else e < 0
    if not finite:
        return EndBehavior(Finiteness.INFINITE, -math.inf if side == "0" else math.inf, None, "exponent")
    x0 = math.log(T.R0)
    if side == "0":
        val, err = quad(T.integrand_log, -np.inf, x0, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=400)
        return EndBehavior(Finiteness.FINITE, -val, err, "exponent")
    val, err = quad(T.integrand_log, x0, np.inf, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=400)
    return EndBehavior(Finiteness.FINITE, val, err, "exponent")


def _bracket_end(T: TTransform, side: str) -> EndBehavior:
    """Dyadic brackets [R0 2^-m, R0] (or [R0, R0 2^m]) with a convergence rule.

    Finite: increments shrink geometrically and fall below CAUCHY_TOL, or the
    increment ratio has stabilized below 1 so the geometric tail can be summed.
    Infinite: partial sums exceed DIVERGE_LEVEL, or the ratio has stabilized at
    or above 1 (non-decaying increments never sum to a finite value).
    """
    x0 = math.log(T.R0)
    step = math.log(2.0)
    sign = -1.0 if side == "0" else 1.0
    total = 0.0
    err = 0.0
    incs = []
    for m in range(1, MAX_BRACKETS + 1):
        a = x0 + sign * (m - 1) * step
        b = x0 + sign * m * step
        val, e = T._segment(min(a, b), max(a, b))
        if not np.isfinite(val):
            raise PoleInDomain("profile is not integrable on a bracket")
        incs.append(val)
        total += val
        err += e
        if total > DIVERGE_LEVEL:
            return EndBehavior(Finiteness.INFINITE, sign * math.inf, None, "brackets")
        if m >= 6:
            d = np.array(incs[-6:])
            if np.all(d[1:] < d[:-1]) and d[-1] < CAUCHY_TOL:
                return EndBehavior(Finiteness.FINITE, sign * total, err + d[-1], "brackets")
    d = np.array(incs[-10:])
    if np.all(d > 0):
        ratios = d[1:] / d[:-1]
        if np.ptp(ratios) < RATIO_STABLE:
            rho = float(ratios[-1])
            if rho >= 1.0 - RATIO_ONE:
                return EndBehavior(Finiteness.INFINITE, sign * math.inf, None, "brackets-ratio")
            tail = d[-1] * rho / (1.0 - rho)
            tail_alt = d[-1] * ratios[-2] / (1.0 - ratios[-2])
            terr = abs(tail - tail_alt) + err
            if terr < 1e-6:
                return EndBehavior(Finiteness.FINITE, sign * (total + tail), terr, "brackets-geometric-tail")
    return EndBehavior(Finiteness.INCONCLUSIVE, None, None, "brackets")


def _w_limit(prof: RadialProfile, side: str) -> WLimit:
    order = prof.order0 if side == "0" else prof.order_inf
    if order is not None:
        if side == "0":
            return WLimit.ZERO if order > 0 else WLimit.NONZERO
        return WLimit.ZERO if order < 0 else WLimit.NONZERO
    probes = W_PROBES_0 if side == "0" else W_PROBES_INF
    vals = np.array([float(prof.fn(np.asarray(r))) for r in probes])
    if not np.all(np.isfinite(vals)):
        return WLimit.UNKNOWN
    if np.all(np.diff(vals) < 0) and vals[-1] < W_ZERO_LEVEL:
        return WLimit.ZERO
    if vals[0] > 0 and np.all(np.diff(vals) >= 0):
        return WLimit.NONZERO
    return WLimit.UNKNOWN


def limit_behavior(T: TTransform) -> LimitBehavior:
    if T.profile.has_poles:
        raise PoleInDomain("profiles with poles cannot be classified")
    e0, ei = T.exponent0, T.exponent_inf
    T0 = _exponent_end(T, e0, "0") if e0 is not None else _bracket_end(T, "0")
    Ti = _exponent_end(T, ei, "inf") if ei is not None else _bracket_end(T, "inf")
    wp = T.w_profile
    return LimitBehavior(T0, Ti, _w_limit(wp, "0"), _w_limit(wp, "inf"))


class CompletionTag(str, enum.Enum):
    CYLINDER = "Cylinder"
    CONE_AT_ZERO = "ConeAtZero"
    CONE_AT_INFINITY = "ConeAtInfinity"
    SUSPENSION = "Suspension"
    UNCLASSIFIED = "Unclassified"


DESCRIPTIONS = {
    CompletionTag.CYLINDER: "ℝ₊×Ȳ with the product topology",
    CompletionTag.CONE_AT_ZERO: "({0}∪ℝ₊)×Ȳ/({0}×Ȳ) = (ℝ₊×Ȳ)∪{*}",
    CompletionTag.CONE_AT_INFINITY: "(ℝ₊∪{∞})×Ȳ/({∞}×Ȳ) = (ℝ₊×Ȳ)∪{*}",
    CompletionTag.SUSPENSION: "({0}∪ℝ₊∪{∞})×Ȳ/({0,∞}×Ȳ) = (ℝ₊×Ȳ)∪{*}∪{*}",
    CompletionTag.UNCLASSIFIED: "no completion case applies",
}

CASE_NUMBER = {
    CompletionTag.CYLINDER: 1,
    CompletionTag.CONE_AT_ZERO: 2,
    CompletionTag.CONE_AT_INFINITY: 3,
    CompletionTag.SUSPENSION: 4,
    CompletionTag.UNCLASSIFIED: None,
}


@dataclass
class CompletionClass:
    tag: CompletionTag
    behavior: LimitBehavior
    description: str = ""
    case: Optional[int] = None

    def __post_init__(self):
        self.description = DESCRIPTIONS[self.tag]
        self.case = CASE_NUMBER[self.tag]

    def to_dict(self):
        return {"class": self.tag.value, "case": self.case, "description": self.description, **self.behavior.to_dict()}


def _tag_of(lb: LimitBehavior) -> CompletionTag:
    f0 = lb.T0.kind
    fi = lb.Tinf.kind
    if Finiteness.INCONCLUSIVE in (f0, fi):
        return CompletionTag.UNCLASSIFIED
    z0 = lb.w_limit_0 is WLimit.ZERO
    zi = lb.w_limit_inf is WLimit.ZERO
    if f0 is Finiteness.INFINITE and fi is Finiteness.INFINITE:
        return CompletionTag.CYLINDER
    if f0 is Finiteness.FINITE and fi is Finiteness.INFINITE:
        return CompletionTag.CONE_AT_ZERO if z0 else CompletionTag.UNCLASSIFIED
    if f0 is Finiteness.INFINITE and fi is Finiteness.FINITE:
        return CompletionTag.CONE_AT_INFINITY if zi else CompletionTag.UNCLASSIFIED
    return CompletionTag.SUSPENSION if (z0 and zi) else CompletionTag.UNCLASSIFIED


def classify(T: TTransform, fiber=None) -> CompletionClass:
    """Completion class of g(w) (k-mode) or (v o f) g (v-mode).

    ``fiber`` (optional) is checked for positive definiteness.
    """
    if T.mode == "k" and not T.k > 0:
        raise NotPositiveDefinite("classification needs k > 0")
    if fiber is not None and not fiber.positive_definite:
        raise NotPositiveDefinite("classification needs a positive definite fiber")
    lb = limit_behavior(T)
    return CompletionClass(_tag_of(lb), lb)


def classify_warped(W: WarpedMetric, R0: float = 1.0) -> CompletionClass:
    return classify(TTransform(W.profile, "k", W.k, R0), W.fiber)


def classify_pair(alpha: float, v: RadialProfile, l: float = 1.0, R0: float = 1.0) -> CompletionClass:
    """Completion of (v o f) g through k = l/alpha and w = r v / l."""
    if not alpha > 0:
        raise NegativeAlpha("classify_pair needs alpha > 0")
    return classify(TTransform(v, "v", R0=R0))


class EbinLabel(str, enum.Enum):
    M_FINITE_PLUS = "Mfinite_plus"
    M_FINITE = "Mfinite"
    M_FINITE_PLUS_WITH_GINF = "Mfinite_plus_with_ginf"
    M_FINITE_WITH_GINF = "Mfinite_with_ginf"


EBIN_TEXT = {
    EbinLabel.M_FINITE_PLUS: "M̂_{finite,+}",
    EbinLabel.M_FINITE: "M̂_{finite}",
    EbinLabel.M_FINITE_PLUS_WITH_GINF: "M̂_{finite,+} ∪ {g∞}",
    EbinLabel.M_FINITE_WITH_GINF: "M̂_{finite} ∪ {g∞}",
}

_EBIN_MAP = {
    CompletionTag.CYLINDER: EbinLabel.M_FINITE_PLUS,
    CompletionTag.CONE_AT_ZERO: EbinLabel.M_FINITE,
    CompletionTag.CONE_AT_INFINITY: EbinLabel.M_FINITE_PLUS_WITH_GINF,
    CompletionTag.SUSPENSION: EbinLabel.M_FINITE_WITH_GINF,
}


@dataclass
class EbinResult:
    n: int
    alpha: float
    label: EbinLabel
    completion: CompletionClass

    def to_dict(self):
        return {
            "n": self.n,
            "alpha": self.alpha,
            "label": self.label.value,
            "label_text": EBIN_TEXT[self.label],
            **self.completion.to_dict(),
        }


def ebin_class(n: int, p_or_v) -> EbinResult:
    """Completion of the conformal Ebin metric (v o f) g_E, degree alpha = n/2.

    A number p stands for v(r) = r^-p.
    """
    v = power(-float(p_or_v)) if np.isscalar(p_or_v) else p_or_v
    alpha = n / 2.0
    cc = classify_pair(alpha, v)
    if cc.tag is CompletionTag.UNCLASSIFIED:
        raise Inconclusive("the profile falls into no completion case")
    return EbinResult(int(n), alpha, _EBIN_MAP[cc.tag], cc)


# --------------------------------------------------------------------------
# length inequalities


def _speed(W: WarpedMetric, z, dz):
    r = z[0]
    xi = float(W.xi(r))
    w = float(W.profile(r))
    gy = W.fiber.metric(z[1:])
    s2 = xi * dz[0] ** 2 + w * float(dz[1:] @ gy @ dz[1:])
    return math.sqrt(max(s2, 0.0))


def segment_length(W: WarpedMetric, p, q) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    d = q - p
    if not np.any(d):
        return 0.0
    if not np.any(d[1:]) and p[0] > 0 and q[0] > 0:
        # radial segment: integrate in log r for accuracy at extreme scales
        T = TTransform(W.profile, "k", W.k)
        val, _ = quad(T.integrand_log, min(math.log(p[0]), math.log(q[0])), max(math.log(p[0]), math.log(q[0])), epsabs=1e-13, epsrel=1e-12, limit=200)
        return val
    val, _ = quad(lambda t: _speed(W, p + t * d, d), 0.0, 1.0, epsabs=1e-13, epsrel=1e-11, limit=200)
    return val


def path_length(W: WarpedMetric, vertices) -> float:
    v = np.atleast_2d(np.asarray(vertices, dtype=float))
    return float(sum(segment_length(W, v[i], v[i + 1]) for i in range(len(v) - 1)))


@dataclass
class LengthReport:
    passed: bool
    length: float
    bound: float
    slack: float

    def to_dict(self):
        return {"pass": self.passed, "length": self.length, "bound": self.bound, "slack": self.slack}


def length_lower_bound_check(W: WarpedMetric, vertices, slack: float = 1e-8) -> LengthReport:
    """L_g(c) >= |T(r1) - T(r0)| for a piecewise-linear chart path."""
    if not (W.k > 0 and W.fiber.positive_definite):
        raise NotPositiveDefinite("length bound needs a positive definite warped metric")
    v = np.atleast_2d(np.asarray(vertices, dtype=float))
    L = path_length(W, v)
    T = TTransform(W.profile, "k", W.k)
    r0, r1 = v[0, 0], v[-1, 0]
    lo, hi = sorted((r0, r1))
    bound = 0.0 if lo == hi else T._segment(math.log(lo), math.log(hi))[0]
    return LengthReport(bool(L >= bound - slack), L, bound, slack)


@dataclass
class DiameterReport:
    passed: bool
    side: str
    best_length: float
    bound: float
    best_s: float
    slack: float

    def to_dict(self):
        return {
            "pass": self.passed,
            "side": self.side,
            "best_length": self.best_length,
            "bound": self.bound,
            "best_s": self.best_s,
            "slack": self.slack,
        }


def comparison_path(p0, p1, s):
    """Vertices of the comparison path c1 * c2 * c3, which dips to scale s between p0 and p1."""
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    a = p0.copy()
    a[0] *= s
    b = p1.copy()
    b[0] *= s
    return np.array([p0, a, b, p1])


def diameter_bound_check(W: WarpedMetric, pairs, side: str = "0", s_values=None, slack: float = 1e-6) -> list:
    """Check d_g <= T(r0) + T(r1) - 2 T0 (side '0') or 2 Tinf - T(r0) - T(r1)."""
    T = TTransform(W.profile, "k", W.k)
    lb = limit_behavior(T)
    if side == "0":
        if not (lb.T0.kind is Finiteness.FINITE and lb.w_limit_0 is WLimit.ZERO):
            raise HypothesisNotMet("needs T0 finite and w -> 0 at 0")
        ends = lb.T0.value
        s_values = np.logspace(-1, -16, 16) if s_values is None else s_values
    elif side == "inf":
        if not (lb.Tinf.kind is Finiteness.FINITE and lb.w_limit_inf is WLimit.ZERO):
            raise HypothesisNotMet("needs Tinf finite and w -> 0 at infinity")
        ends = lb.Tinf.value
        s_values = np.logspace(1, 16, 16) if s_values is None else s_values
    else:
        raise ValueError("side must be '0' or 'inf'")
    out = []
    for p0, p1 in pairs:
        t0 = T(p0[0])
        t1 = T(p1[0])
        bound = t0 + t1 - 2 * ends if side == "0" else 2 * ends - t0 - t1
        best, best_s = math.inf, None
        for s in s_values:
            L = path_length(W, comparison_path(p0, p1, s))
            if L < best:
                best, best_s = L, float(s)
        out.append(DiameterReport(bool(best <= bound + slack), side, best, float(bound), best_s, slack))
    return out


def completion_record(cc: CompletionClass, descriptor: dict | None = None) -> dict:
    rec = {"profile": descriptor}
    rec.update(cc.to_dict())
    return rec
