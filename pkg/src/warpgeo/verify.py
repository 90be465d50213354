"""Registry of invariant checks run by ``warpgeo verify``.

Each check is a function ``fn(ctx, tol) -> (residual, detail)``; it passes
when ``residual <= tol``.  Residuals are nonnegative: an absolute or relative
error, a count of mismatches, or the largest violation of an inequality.
Checks get their own RNG derived from the run seed and the check name, so
results do not depend on scheduling.
"""
from __future__ import annotations

import math
import os
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from . import completion as cp
from . import csc
from . import pairs as pr
from .core import (
    GeodesicState,
    christoffel_fd,
    integrate_geodesic,
    riemann_fd,
    sectional_curvature_fd,
    sectional_curvature_fd_richardson,
)
from .errors import ChartExit, DegeneratePlane, IllConditioned
from .fibers import flat, hyperbolic, sphere
from .geodesics import (
    Convexity,
    GeodesicInit,
    ThetaBranch,
    conservation_residuals,
    explicit_geodesic,
    fiber_sign,
    radial_convexity,
)
from .profiles import constant, from_function, power, times_power
from .warped import WarpedMetric, as_metric_field, k_fiber, k_general, k_radial, mixed_curvature_coefficient

DEFAULT_SEED = 0


@dataclass
class VerifyContext:
    seed: int = DEFAULT_SEED
    samples: Optional[int] = None
    tol: Optional[float] = None
    hat_sign: float = 1.0

    def n(self, default: int) -> int:
        return int(self.samples) if self.samples else default

    def rng(self, name: str):
        return np.random.default_rng([int(self.seed), zlib.crc32(name.encode())])


@dataclass(frozen=True)
class Check:
    name: str
    module: str
    fn: Callable
    tol: float
    criterion: Optional[int] = None
    description: str = ""


@dataclass
class CheckResult:
    name: str
    module: str
    criterion: Optional[int]
    passed: bool
    residual: float
    tol: float
    seconds: float
    detail: dict = field(default_factory=dict)
    error: Optional[str] = None

    def to_dict(self):
        return {
            "name": self.name,
            "module": self.module,
            "criterion": self.criterion,
            "pass": self.passed,
            "residual": self.residual,
            "tol": self.tol,
            "seconds": round(self.seconds, 3),
            "detail": self.detail,
            "error": self.error,
        }


REGISTRY: list[Check] = []


def check(name, module, tol, criterion=None, description=""):
    def deco(fn):
        REGISTRY.append(Check(name, module, fn, tol, criterion, description or (fn.__doc__ or "").strip()))
        return fn

    return deco


def _max(xs, default=0.0):
    xs = [float(x) for x in xs]
    return max(xs) if xs else default


# --------------------------------------------------------------------------
# shared fixtures


def shipped_warped():
    """Positive-definite, pole-free warped metrics used by the sweeps."""
    return {
        "flat_cone_sphere": WarpedMetric(0.25, power(1.0), sphere(2)),
        "cylinder_flat": WarpedMetric(1.0, constant(1.0), flat(2)),
        "power2_flat": WarpedMetric(1.0, power(2.0), flat(2)),
        "power_neg1_hyperbolic": WarpedMetric(0.5, power(-1.0), hyperbolic(2)),
        "cosh_sphere": WarpedMetric(1.0, csc.solve_csc_profile(1.0, 1.0, 0.25), sphere(2)),
    }


def shipped_potentials():
    return [pr.quadratic(2), pr.quadratic(3), pr.quadratic(4), pr.product2d(), pr.maschke(), pr.lorentz_quadratic(3)]


def _rand_plane(rng, n):
    return rng.normal(size=n), rng.normal(size=n)


# --------------------------------------------------------------------------
# geom-core


def _core_metrics():
    out = {name: as_metric_field(W) for name, W in shipped_warped().items()}
    P, _ = pr.hessian_cone_pair(pr.quadratic(3))
    out["hess_quadratic3"] = P.g
    return out


def _core_point(name, rng):
    if name.startswith("hess"):
        return np.array([0.6, 0.5, 0.55]) + 0.05 * rng.normal(size=3)
    return np.r_[math.exp(rng.uniform(-0.5, 0.5)), rng.uniform(-0.4, 0.4), rng.uniform(0.6, 1.4)]


@check("core.christoffel_symmetry", "geom-core", 0.0)
def _c_chris(ctx, tol):
    """Christoffel symbols are symmetric in the lower indices."""
    rng = ctx.rng("core.christoffel_symmetry")
    worst = 0.0
    for name, g in _core_metrics().items():
        for _ in range(ctx.n(5)):
            G = christoffel_fd(g, _core_point(name, rng))
            worst = max(worst, float(np.max(np.abs(G - np.swapaxes(G, 1, 2)))))
    return worst, {}


@check("core.riemann_antisymmetry", "geom-core", 1e-8)
def _c_riem(ctx, tol):
    """R^i_jkl = -R^i_jlk, relative to the tensor size."""
    rng = ctx.rng("core.riemann_antisymmetry")
    worst = 0.0
    for name, g in _core_metrics().items():
        for _ in range(ctx.n(5)):
            R = riemann_fd(g, _core_point(name, rng))
            worst = max(worst, float(np.max(np.abs(R + np.swapaxes(R, 2, 3))) / max(1.0, np.max(np.abs(R)))))
    return worst, {}


@check("core.sectional_basis_invariance", "geom-core", 1e-8)
def _c_basis(ctx, tol):
    """Sectional curvature does not depend on the basis of the plane."""
    rng = ctx.rng("core.sectional_basis_invariance")
    worst = 0.0
    for name, g in _core_metrics().items():
        for _ in range(ctx.n(5)):
            x = _core_point(name, rng)
            a, b = _rand_plane(rng, g.dim)
            M = rng.normal(size=(2, 2))
            if abs(np.linalg.det(M)) < 0.1:
                M += np.eye(2)
            k1 = sectional_curvature_fd(g, x, a, b)
            k2 = sectional_curvature_fd(g, x, M[0, 0] * a + M[0, 1] * b, M[1, 0] * a + M[1, 1] * b)
            worst = max(worst, abs(k1 - k2) / max(1.0, abs(k1)))
    return worst, {}


@check("core.geodesic_speed_drift", "geom-core", 1e-9)
def _c_drift(ctx, tol):
    """g(v, v) drift along integrate_geodesic (tol 1e-10) stays below 10 tol."""
    rng = ctx.rng("core.geodesic_speed_drift")
    worst = 0.0
    for name, g in _core_metrics().items():
        x = _core_point(name, rng)
        v = 0.3 * rng.normal(size=g.dim)
        tr = integrate_geodesic(g, GeodesicState(x, v), 1.0, tol=1e-10)
        worst = max(worst, tr.speed_drift / max(1.0, abs(float(tr.speed[0]))))
    return worst, {}


# --------------------------------------------------------------------------
# warped-metrics


def _family_profiles():
    return {
        "power": lambda rng: power(rng.uniform(-2, 2)),
        "cosh": lambda rng: csc.csc_profile(csc.CscParams(rng.uniform(0.3, 2), rng.uniform(0.1, 1.5), rng.uniform(-0.3, 0.3))),
        "sine": lambda rng: csc.csc_profile(csc.CscParams(-rng.uniform(0.3, 2), -rng.uniform(0.1, 1.0), rng.uniform(-0.3, 0.3))),
        "user": lambda rng: from_function(lambda r: 1.0 + 0.3 * np.sin(np.log(r)) + 0.1 * r),
    }


def _sample_warped(rng, prof):
    fib = [flat(2), sphere(2), hyperbolic(2)][int(rng.integers(3))]
    k = rng.uniform(0.3, 2.0) * (1 if rng.uniform() < 0.8 else -1)
    return WarpedMetric(k, prof, fib)


def _sample_point(W, rng):
    from .warped import sample_radii

    r = float(sample_radii(W, rng, 1, 0.5, 2.0)[0])
    y = W.fiber.sample(rng, 1)[0]
    return r, y


@check("warped.k_general_vs_fd", "warped-metrics", 1.0)
def _w_general(ctx, tol):
    """k_general against the FD oracle: residual is the error over max(1e-4, 1e-3 |K|)."""
    rng = ctx.rng("warped.k_general_vs_fd")
    worst = 0.0
    for fam, mk in _family_profiles().items():
        for _ in range(ctx.n(50)):
            W = _sample_warped(rng, mk(rng))
            r, y = _sample_point(W, rng)
            A, B = _rand_plane(rng, W.dim)
            try:
                kc = k_general(W, r, y, A, B)
                kf = sectional_curvature_fd(as_metric_field(W), np.r_[r, y], A, B)
            except (DegeneratePlane, IllConditioned):
                continue
            worst = max(worst, abs(kc - kf) / max(1e-4, 1e-3 * abs(kf)))
    return worst, {}


@check("warped.mixed_curvature", "warped-metrics", 1e-4)
def _w_mixed(ctx, tol):
    """g(R(d_r, a) b, d_r) / g(a, b) against the FD curvature contraction."""
    rng = ctx.rng("warped.mixed_curvature")
    worst = 0.0
    for fam, mk in _family_profiles().items():
        for _ in range(ctx.n(10)):
            W = _sample_warped(rng, mk(rng))
            r, y = _sample_point(W, rng)
            g = as_metric_field(W)
            x = np.r_[r, y]
            R = riemann_fd(g, x)
            g0 = g(x)
            a = np.r_[0.0, rng.normal(size=W.fiber.dim)]
            b = np.r_[0.0, rng.normal(size=W.fiber.dim)]
            dr = np.eye(W.dim)[0]
            # g(R(X, Y) Z, V) with R^i_jkl = dx^i(R(e_k, e_l) e_j)
            Rv = np.einsum("ijkl,j,k,l->i", R, b, dr, a)
            lhs = float(g0[0] @ Rv)
            gab = float(a @ g0 @ b)
            if abs(gab) < 1e-3:
                continue
            pred = float(mixed_curvature_coefficient(W, r)) * gab
            worst = max(worst, abs(lhs - pred) / max(1.0, abs(pred)))
    return worst, {}


@check("warped.bounds_between", "warped-metrics", 1e-9)
def _w_between(ctx, tol):
    """For definite W, k_general lies between k_radial and the fiber-plane curvature."""
    rng = ctx.rng("warped.bounds_between")
    worst = 0.0
    for fam, mk in _family_profiles().items():
        for _ in range(ctx.n(20)):
            W = _sample_warped(rng, mk(rng))
            if not W.definite:
                continue
            r, y = _sample_point(W, rng)
            A, B = _rand_plane(rng, W.dim)
            a, b = A.copy(), B.copy()
            a[0] = b[0] = 0.0
            kr = float(k_radial(W, r))
            kf = k_fiber(W, r, a[1:], b[1:], y)
            kg = k_general(W, r, y, A, B)
            lo, hi = min(kr, kf), max(kr, kf)
            worst = max(worst, (lo - kg) / max(1.0, abs(lo)), (kg - hi) / max(1.0, abs(hi)), 0.0)
    return worst, {}


@check("warped.scaling", "warped-metrics", 1e-8)
def _w_scaling(ctx, tol):
    """K of g(lambda w) equals K of g(w) / lambda (untagged profiles use FD derivatives)."""
    rng = ctx.rng("warped.scaling")
    worst = 0.0
    for fam, mk in _family_profiles().items():
        for _ in range(ctx.n(10)):
            prof = mk(rng)
            W = _sample_warped(rng, prof)
            lam = math.exp(rng.uniform(-1, 1))
            W2 = WarpedMetric(W.k, prof.scaled(lam), W.fiber)
            r, y = _sample_point(W, rng)
            A, B = _rand_plane(rng, W.dim)
            k1 = k_general(W, r, y, A, B)
            k2 = k_general(W2, r, y, A, B)
            worst = max(worst, abs(k2 - k1 / lam) / max(1.0, abs(k1)))
    return worst, {}


@check("warped.flat_cone_riemann", "warped-metrics", 1e-5, criterion=5)
def _w_cone_fd(ctx, tol):
    """k = 1/4, w = r over the unit 2-sphere: riemann_fd norm at 20 points."""
    rng = ctx.rng("warped.flat_cone_riemann")
    W = WarpedMetric(0.25, power(1.0), sphere(2))
    g = as_metric_field(W)
    worst = 0.0
    for _ in range(ctx.n(20)):
        r, y = _sample_point(W, rng)
        worst = max(worst, float(np.linalg.norm(riemann_fd(g, np.r_[r, y]))))
    return worst, {}


@check("warped.flat_cone_closed_form", "warped-metrics", 1e-6, criterion=5)
def _w_cone_cf(ctx, tol):
    """k = 1/4, w = r over the unit 2-sphere: k_radial and k_fiber vanish."""
    rng = ctx.rng("warped.flat_cone_closed_form")
    W = WarpedMetric(0.25, power(1.0), sphere(2))
    worst = 0.0
    for _ in range(ctx.n(20)):
        r, y = _sample_point(W, rng)
        a, b = _rand_plane(rng, 2)
        worst = max(worst, abs(float(k_radial(W, r))), abs(k_fiber(W, r, a, b, y)))
    return worst, {}


# --------------------------------------------------------------------------
# csc-families


def _regime_draw(regime, rng):
    k = rng.uniform(0.4, 2.0)
    C2 = rng.uniform(-0.3, 0.3)
    if regime == "Delta1":
        C = rng.uniform(0.2, 2.0)
        C1 = rng.uniform(0.1, 1.5)
    elif regime == "Delta2":
        C, C1 = 0.0, rng.uniform(0.0, 1.5)
    else:
        C = -rng.uniform(0.2, 2.0)
        C1 = -rng.uniform(0.0, 1.0) if rng.uniform() < 0.8 else 0.0
    bs = 1 if rng.uniform() < 0.5 else -1
    return k, C, C1, C2, bs


@check("csc.fd_oracle", "csc-families", 1e-5, criterion=1)
def _csc_fd(ctx, tol):
    """Per regime, 20 draws x 20 radii: FD sectional curvature of (d_r, fiber) planes minus C.

    The oracle takes one Richardson step; the plain default step loses about
    1e-4 relative accuracy within a few percent of a Delta3 pole.
    """
    rng = ctx.rng("csc.fd_oracle")
    worst = {}
    for regime in ("Delta1", "Delta2", "Delta3"):
        wr = 0.0
        for _ in range(ctx.n(20)):
            k, C, C1, C2, bs = _regime_draw(regime, rng)
            W = WarpedMetric(k, csc.solve_csc_profile(k, C, C1, C2, bs), flat(1))
            g = as_metric_field(W)
            from .warped import sample_radii

            for r in sample_radii(W, rng, ctx.n(20), 0.3, 3.0):
                kfd = sectional_curvature_fd_richardson(g, np.r_[r, 0.0], np.r_[1.0, 0.0], np.r_[0.0, 1.0])
                wr = max(wr, abs(kfd - C))
        worst[regime] = wr
    return max(worst.values()), worst


@check("csc.regime_closure", "csc-families", 1e-5)
def _csc_closure(ctx, tol):
    """Closed-form k_radial reproduces C at 20 log-spaced radii per regime."""
    rng = ctx.rng("csc.regime_closure")
    worst = 0.0
    for regime in ("Delta1", "Delta2", "Delta3"):
        k, C, C1, C2, bs = _regime_draw(regime, rng)
        W = WarpedMetric(k, csc.solve_csc_profile(k, C, C1, C2, bs), flat(1))
        for r in np.exp(np.linspace(math.log(0.05), math.log(20), 20)):
            try:
                W.profile.check_pole(r)
            except Exception:
                continue
            worst = max(worst, abs(float(k_radial(W, r)) - C))
    return worst, {}


@check("csc.delta2_exponents", "csc-families", 0.0)
def _csc_d2(ctx, tol):
    """Delta2 profiles carry order0 = order_inf = +-2 sqrt(C1) exactly."""
    bad = 0
    for C1 in (0.0, 0.25, 1.0, 2.0):
        for bs in (1, -1):
            p = csc.csc_profile(csc.CscParams(0.0, C1, 0.1, bs))
            e = bs * 2 * math.sqrt(C1)
            bad += int(p.order0 != e or p.order_inf != e)
    return float(bad), {}


@check("csc.delta3_continuity", "csc-families", 1e-3)
def _csc_cont(ctx, tol):
    """w(s, C1, C2, r) -> w(s, 0, C2, r) as C1 -> 0 from below."""
    worst = 0.0
    for s, C2 in ((-1.0, 0.2), (-0.5, -0.1)):
        pa = csc.csc_profile(csc.CscParams(s, -1e-6, C2))
        pb = csc.csc_profile(csc.CscParams(s, 0.0, C2))
        for r in np.exp(np.linspace(-2, 2, 21)):
            try:
                pa.check_pole(r)
                pb.check_pole(r)
            except Exception:
                continue
            if abs(math.log(r) + C2) < 0.05:
                continue
            worst = max(worst, abs(float(pa(r)) / float(pb(r)) - 1))
    return worst, {}


@check("csc.fiber_shift", "csc-families", 1e-5)
def _csc_shift(ctx, tol):
    """k_fiber = (K_Y - C1/k)/w + C for every regime sample."""
    rng = ctx.rng("csc.fiber_shift")
    worst = 0.0
    for regime in ("Delta1", "Delta2", "Delta3"):
        for fib in (flat(2), sphere(2), hyperbolic(2)):
            k, C, C1, C2, bs = _regime_draw(regime, rng)
            W = WarpedMetric(k, csc.solve_csc_profile(k, C, C1, C2, bs), fib)
            r, y = _sample_point(W, rng)
            a, b = _rand_plane(rng, 2)
            pred = (fib.known_csc - C1 / k) / float(W.profile(r)) + C
            worst = max(worst, abs(k_fiber(W, r, a, b, y) - pred) / max(1.0, abs(pred)))
    return worst, {}


# --------------------------------------------------------------------------
# geodesics


def _geodesic_cases(rng, n):
    cases = []
    for i in range(n):
        fib = [flat(2), sphere(2), hyperbolic(2)][i % 3]
        k = rng.uniform(0.3, 2.0)
        C0 = rng.uniform(-3, 3)
        init = GeodesicInit(rng.uniform(0.5, 2.0), fib.sample(rng, 1)[0], 0.5 * rng.normal(), 0.4 * rng.normal(size=2))
        cases.append((k, C0, init, fib))
    return cases


def _targeted_cases():
    from .fibers import minkowski

    return {
        ThetaBranch.RATIONAL: (1.0, 2.0, GeodesicInit(1.0, [0.0, 0.0], -0.5, [0.0, 0.0]), flat(2)),
        ThetaBranch.ARCTANH: (-1.0, 1.5, GeodesicInit(1.2, [0.0, 0.0], 0.3, [0.5, 0.2]), flat(2)),
        ThetaBranch.LOG: (1.0, 1.0, GeodesicInit(1.0, [0.0, 0.0], 0.5, [0.5, 0.0]), minkowski(2)),
        ThetaBranch.IDENTITY: (1.0, 2.5, GeodesicInit(1.0, [0.0, 0.0], 0.0, [0.0, 0.0]), flat(2)),
        ThetaBranch.ARCTAN: (1.0, 2.0, GeodesicInit(1.0, [0.0, 0.0], 0.0, [1.0, 0.0]), flat(2)),
    }


COMPLETE_HORIZON = 2.0


def _horizon(p):
    # complete geodesics have t_max = inf and need a finite window
    return 0.9 * p.t_max if math.isfinite(p.t_max) else COMPLETE_HORIZON


def _explicit_vs_ode(k, C0, init, fib, n_t=50):
    p = explicit_geodesic(k, C0, init, fib)
    T = _horizon(p)
    tt = np.linspace(0.0, T, n_t)
    tr = integrate_geodesic(
        as_metric_field(p.warped_metric()), GeodesicState(np.r_[init.r0, init.y0], np.r_[init.rdot0, init.ydot0]), T, tol=1e-10, method="RK45"
    )
    xs, _ = tr(tt)
    return p, tt, float(np.max(np.abs(xs - p.position(tt)))), tr.status


@check("geodesics.oracle_gap", "geodesics", 1e-6, criterion=2)
def _g_oracle(ctx, tol):
    """Sup-norm gap between explicit geodesics and RK integration (tol 1e-10), 30 random cases."""
    rng = ctx.rng("geodesics.oracle")
    worst, statuses = 0.0, []
    for case in _geodesic_cases(rng, ctx.n(30)):
        _, _, gap, st = _explicit_vs_ode(*case)
        worst = max(worst, gap)
        statuses.append(st)
    return worst, {"ode_status": sorted(set(statuses))}


@check("geodesics.theta_quadrature", "geodesics", 1e-9, criterion=2)
def _g_theta(ctx, tol):
    """theta closed form against quadrature of 1/mu; all five branches exercised."""
    rng = ctx.rng("geodesics.oracle")
    cases = _geodesic_cases(rng, ctx.n(30)) + list(_targeted_cases().values())
    worst, seen = 0.0, set()
    for k, C0, init, fib in cases:
        p = explicit_geodesic(k, C0, init, fib)
        seen.add(p.branch.value)
        tt = np.linspace(0.0, _horizon(p), 20)
        th = np.array([quad(lambda s: 1.0 / p.mu(s), 0.0, t, epsabs=1e-13, epsrel=1e-13)[0] for t in tt])
        worst = max(worst, float(np.max(np.abs(th - p.theta(tt)))))
    missing = sorted({b.value for b in ThetaBranch} - seen)
    return (math.inf if missing else worst), {"branches": sorted(seen), "missing": missing}


@check("geodesics.targeted_branches_oracle", "geodesics", 1e-6, criterion=2)
def _g_targeted(ctx, tol):
    """Targeted branch inits also agree with the RK oracle."""
    worst, got = 0.0, {}
    for want, case in _targeted_cases().items():
        p, _, gap, _ = _explicit_vs_ode(*case)
        got[want.value] = p.branch.value
        worst = max(worst, gap)
    bad = sum(k != v for k, v in got.items())
    return (math.inf if bad else worst), {"branches": got}


@check("geodesics.conservation", "geodesics", 1e-7, criterion=3)
def _g_cons(ctx, tol):
    """E1 drift, energy identity and radial ODE residual along every criterion-2 case."""
    rng = ctx.rng("geodesics.oracle")
    worst = {"e1": 0.0, "e2": 0.0, "ode": 0.0}
    for k, C0, init, fib in _geodesic_cases(rng, ctx.n(30)):
        p = explicit_geodesic(k, C0, init, fib)
        c = conservation_residuals(p, np.linspace(0.0, _horizon(p), 50))
        worst["e1"] = max(worst["e1"], c.e1_residual)
        worst["e2"] = max(worst["e2"], c.e2_residual)
        worst["ode"] = max(worst["ode"], c.ode_residual)
    return max(worst.values()), worst


def _convexity_cases():
    # (label, k sign, fiber, C0 range, expected)
    return [
        ("C0=0", 1.0, flat(2), (0.0, 0.0), Convexity.CONVEX),
        ("0<C0<=2,k gY>0", 1.0, sphere(2), (0.05, 2.0), Convexity.CONVEX),
        ("C0<0,k gY<0", -1.0, flat(2), (-3.0, -0.05), Convexity.CONVEX),
        ("C0>=2,k gY<0", -1.0, hyperbolic(2), (2.0, 3.0), Convexity.CONCAVE),
    ]


def _second_diff_violation(r, expected):
    d2 = r[2:] - 2 * r[1:-1] + r[:-2]
    if expected is Convexity.CONVEX:
        return float(max(0.0, -np.min(d2)))
    return float(max(0.0, np.max(d2)))


@check("geodesics.convexity", "geodesics", 1e-8, criterion=8)
def _g_convex(ctx, tol):
    """Each branch of the radial convexity rule: second differences of r have the stated sign."""
    rng = ctx.rng("geodesics.convexity")
    detail = {}
    worst = 0.0
    for label, ks, fib, (lo, hi), expected in _convexity_cases():
        wb = 0.0
        for _ in range(ctx.n(20)):
            k = ks * rng.uniform(0.3, 2.0)
            C0 = rng.uniform(lo, hi)
            if radial_convexity(k, C0, fiber_sign(k, fib)) is not expected:
                wb = math.inf
                break
            init = GeodesicInit(rng.uniform(0.5, 2.0), fib.sample(rng, 1)[0], 0.5 * rng.normal(), 0.4 * rng.normal(size=2))
            p = explicit_geodesic(k, C0, init, fib)
            tt = np.linspace(0.0, _horizon(p), 60)
            wb = max(wb, _second_diff_violation(p.r(tt), expected))
        detail[label] = wb
        worst = max(worst, wb)
    return worst, detail


@check("geodesics.incompleteness_witness", "geodesics", 0.0)
def _g_incomplete(ctx, tol):
    """For C0 != 0, radial geodesics reach the end of their t-domain in finite time."""
    rng = ctx.rng("geodesics.incompleteness_witness")
    bad = 0
    for _ in range(ctx.n(20)):
        C0 = rng.choice([-1, 1]) * rng.uniform(0.2, 3.0)
        rdot = rng.choice([-1, 1]) * rng.uniform(0.1, 1.0)
        p = explicit_geodesic(rng.uniform(0.3, 2.0), C0, GeodesicInit(1.0, [0.0, 0.0], rdot, [0.0, 0.0]), flat(2))
        bad += int(p.complete)
    return float(bad), {}


# --------------------------------------------------------------------------
# homogeneous-pairs


@check("pairs.verify_pair", "homogeneous-pairs", 1e-6, criterion=6)
def _p_verify(ctx, tol):
    """Homogeneity of g and f, g(P, .) = df and the Euler identity, for pair_g and pair_ghat."""
    rng = ctx.rng("pairs.verify_pair")
    detail, worst = {}, 0.0
    for pot in shipped_potentials():
        for P in pr.hessian_cone_pair(pot):
            rep = pr.verify_pair(P, ctx.n(20), rng, tol)
            res = max(rep.homog_g, rep.homog_f, rep.euler, rep.df_P)
            detail[P.name] = res
            worst = max(worst, res)
    return worst, detail


@check("pairs.flatness", "homogeneous-pairs", 1e-4, criterion=6)
def _p_flat(ctx, tol):
    """riemann_fd of the Hessian metric at definite-region samples."""
    rng = ctx.rng("pairs.flatness")
    detail, worst = {}, 0.0
    for pot in shipped_potentials():
        P, _ = pr.hessian_cone_pair(pot)
        res = _max(np.linalg.norm(riemann_fd(P.g, x)) for x in P.sample(rng, ctx.n(10)))
        detail[pot.name] = res
        worst = max(worst, res)
    return worst, detail


@check("pairs.hat_consistency", "homogeneous-pairs", 1e-6, criterion=6)
def _p_hat(ctx, tol):
    """df (x) df / f + (1 - alpha) g equals -f Dd log f."""
    rng = ctx.rng("pairs.hat_consistency")
    detail, worst = {}, 0.0
    for pot in shipped_potentials():
        P, Q = pr.hessian_cone_pair(pot)
        H = pr.hat_metric_field(P, ctx.hat_sign)
        res = _max(np.max(np.abs(H(x) - Q.g(x))) for x in P.sample(rng, ctx.n(10)))
        detail[pot.name] = res
        worst = max(worst, res)
    return worst, detail


@check("pairs.hat_signature", "homogeneous-pairs", 0.0)
def _p_hatsig(ctx, tol):
    """The signature of g_hat follows from alpha and the signature of g."""
    bad = {}
    for pot in shipped_potentials():
        P, _ = pr.hessian_cone_pair(pot)
        _, rep = pr.hat_metric(P)
        if not rep.consistent:
            bad[pot.name] = rep.to_dict()
    return float(len(bad)), bad


@check("pairs.level_relation", "homogeneous-pairs", 1e-4, criterion=6)
def _p_level(ctx, tol):
    """K^g(a, b) = (l/r)(K^{g_l}(a, b) - alpha/(4l)) on fiber planes (dim >= 3)."""
    rng = ctx.rng("pairs.level_relation")
    detail, worst = {}, 0.0
    for pot in shipped_potentials():
        P, _ = pr.hessian_cone_pair(pot)
        if P.dim < 3:
            continue
        rep = pr.level_curvature_relation(P, float(P.f(P.probe)), ctx.n(10), rng, tol)
        detail[pot.name] = rep.max_residual
        worst = max(worst, rep.max_residual)
    return worst, detail


def _split_profiles():
    cosh_v = times_power(csc.csc_profile(csc.CscParams(1.0, 1.0, 0.0)), -1.0)
    return {"1": constant(1.0), "r": power(1.0), "r^-2": power(-2.0), "cosh": cosh_v}


def _split_samples(sp, rng, n):
    out = []
    fib = sp.chart.fiber()
    for _ in range(n):
        u = fib.sample(rng, 1)[0]
        r = float(math.exp(rng.uniform(-1, 1))) * sp.l
        out.append((r, u))
    return out


@check("pairs.split_pullback", "homogeneous-pairs", 1e-6, criterion=7)
def _p_pullback(ctx, tol):
    """psi^*((v o f) g) against the warped block form, 30 samples per pair and v."""
    rng = ctx.rng("pairs.split_pullback")
    detail, worst = {}, 0.0
    for pot in shipped_potentials():
        P, _ = pr.hessian_cone_pair(pot)
        l = float(P.f(P.probe))
        for vn, v in _split_profiles().items():
            sp = pr.split(P, l, v)
            res = _max(sp.pullback_residual(r, u) for r, u in _split_samples(sp, rng, ctx.n(30)))
            detail[f"{pot.name}/{vn}"] = res
            worst = max(worst, res)
    return worst, detail


@check("pairs.split_roundtrip", "homogeneous-pairs", 1e-10, criterion=7)
def _p_roundtrip(ctx, tol):
    """psi o psi^-1 = id and f(psi(r, u)) = r, relative to |x| and r."""
    rng = ctx.rng("pairs.split_roundtrip")
    worst = 0.0
    for pot in shipped_potentials():
        P, _ = pr.hessian_cone_pair(pot)
        l = float(P.f(P.probe))
        sp = pr.split(P, l, constant(1.0))
        for r, u in _split_samples(sp, rng, ctx.n(30)):
            x = sp.psi(r, u)
            back = sp.psi_chart(sp.psi_inv(x))
            worst = max(worst, float(np.max(np.abs(back - x))) / max(1.0, float(np.linalg.norm(x))))
            worst = max(worst, abs(float(P.f(x)) - r) / max(1.0, r))
    return worst, {}


@check("pairs.inversion_isometry", "homogeneous-pairs", 1e-5, criterion=7)
def _p_inversion(ctx, tol):
    """psi_M is an isometry between g and g / f^2."""
    rng = ctx.rng("pairs.inversion_isometry")
    detail, worst = {}, 0.0
    for pot in shipped_potentials():
        P, _ = pr.hessian_cone_pair(pot)
        rep = pr.isometry_check(pr.inversion_map(P), P.g, pr.conformal_metric(P, power(-2.0)), P.sample(rng, ctx.n(10)), tol)
        detail[pot.name] = rep.max_residual
        worst = max(worst, rep.max_residual)
    return worst, detail


def _pair_velocity(P, x0, rng):
    scale = 0.03 if P.name.endswith("maschke") else 0.3
    return scale * float(np.linalg.norm(x0)) * rng.normal(size=P.dim)


@check("pairs.geodesic_level_f", "homogeneous-pairs", 1e-8)
def _p_geo_f(ctx, tol):
    """Along pair geodesics, |f(gamma(t)) - r(t)| relative to r."""
    rng = ctx.rng("pairs.geodesic_level_f")
    worst, skipped = 0.0, 0
    for pot in shipped_potentials():
        P, _ = pr.hessian_cone_pair(pot)
        for beta in (-2.0, -1.0, 0.0, 0.5, 2.0):
            x0 = P.sample(rng, 1)[0]
            pg = pr.pair_geodesic(P, beta, x0, _pair_velocity(P, x0, rng))
            tt = np.linspace(0.0, min(0.9 * pg.t_domain[1], 1.0), 20)
            try:
                xs = pg(tt)
            except ChartExit:
                skipped += 1
                continue
            r = pg.r(tt)
            worst = max(worst, float(np.max(np.abs(P.f(xs) - r) / r)))
    return worst, {"skipped_chart_exit": skipped}


@check("pairs.geodesic_oracle", "homogeneous-pairs", 1e-6)
def _p_geo_ode(ctx, tol):
    """Pair geodesics against direct integration of f^beta g."""
    rng = ctx.rng("pairs.geodesic_oracle")
    worst, skipped = 0.0, 0
    for pot in (pr.quadratic(3), pr.product2d(), pr.maschke(), pr.lorentz_quadratic(3)):
        P, _ = pr.hessian_cone_pair(pot)
        for beta in (-2.0, 0.0, 1.0):
            x0 = P.sample(rng, 1)[0]
            A = _pair_velocity(P, x0, rng)
            pg = pr.pair_geodesic(P, beta, x0, A)
            T = min(0.9 * pg.t_domain[1], 1.0)
            tt = np.linspace(0.0, T, 20)
            try:
                xs = pg(tt)
            except ChartExit:
                skipped += 1
                continue
            tr = pr.ode_pair_geodesic(P, beta, x0, A, T)
            if tr.status != "ok":
                skipped += 1
                continue
            ys, _ = tr(tt)
            worst = max(worst, float(np.max(np.abs(ys - xs))) / max(1.0, float(np.linalg.norm(x0))))
    return worst, {"skipped": skipped}


def _f_convexity_cases():
    # (label, potential factory, beta range, expected)
    return [
        ("beta=-1", pr.quadratic, (-1.0, -1.0), Convexity.CONVEX),
        ("-1<beta<=1,positive level", pr.quadratic, (-0.95, 1.0), Convexity.CONVEX),
        ("beta<-1,negative level", pr.lorentz_quadratic, (-3.0, -1.05), Convexity.CONVEX),
        ("beta>=1,negative level", pr.lorentz_quadratic, (1.0, 3.0), Convexity.CONCAVE),
    ]


@check("pairs.f_convexity", "homogeneous-pairs", 1e-8, criterion=8)
def _p_convex(ctx, tol):
    """Each branch of the f-convexity rule: second differences of f along 20 geodesics."""
    rng = ctx.rng("pairs.f_convexity")
    detail, worst = {}, 0.0
    for label, factory, (lo, hi), expected in _f_convexity_cases():
        P, _ = pr.hessian_cone_pair(factory(3))
        wb = 0.0
        for _ in range(ctx.n(20)):
            beta = float(rng.uniform(lo, hi)) if hi > lo else lo
            if pr.f_convexity(P, beta) is not expected:
                wb = math.inf
                break
            x0 = P.sample(rng, 1)[0]
            pg = pr.pair_geodesic(P, beta, x0, _pair_velocity(P, x0, rng))
            tt = np.linspace(0.0, min(0.9 * pg.t_domain[1], 1.0), 60)
            try:
                fx = P.f(pg(tt))
            except ChartExit:
                continue
            wb = max(wb, _second_diff_violation(np.asarray(fx), expected))
        detail[label] = wb
        worst = max(worst, wb)
    return worst, detail


@check("pairs.curvature_bounds", "homogeneous-pairs", 0.0)
def _p_bounds(ctx, tol):
    """Conformal constant-curvature bounds for Hessian pairs; failures counted."""
    rng = ctx.rng("pairs.curvature_bounds")
    bad, detail = 0, {}
    P, _ = pr.hessian_cone_pair(pr.quadratic(3))
    for mode in (pr.BoundHess(0.0, 0.25), pr.BoundHess(1.0, 0.25), pr.BoundHess(1.0, 0.5)):
        rep = pr.curvature_bound_corollaries(P, mode, ctx.n(10), rng)
        detail[f"quadratic3/{mode}"] = rep.to_dict()
        bad += int(not rep.passed)
    L, _ = pr.hessian_cone_pair(pr.lorentz_quadratic(3))
    for beta in (0.0, 1.0, -2.0):
        rep = pr.curvature_bound_corollaries(L, pr.BoundLogFlat(beta), ctx.n(10), rng)
        detail[f"lorentz3/beta={beta}"] = rep.to_dict()
        bad += int(not rep.passed)
    return float(bad), detail


# --------------------------------------------------------------------------
# completion


CR_TABLE = {1.0: cp.EbinLabel.M_FINITE_PLUS, 0.0: cp.EbinLabel.M_FINITE, -1.0: cp.EbinLabel.M_FINITE, 2.0: cp.EbinLabel.M_FINITE_PLUS_WITH_GINF}
CR_TAGS = {1.0: cp.CompletionTag.CYLINDER, 0.0: cp.CompletionTag.CONE_AT_ZERO, -1.0: cp.CompletionTag.CONE_AT_ZERO, 2.0: cp.CompletionTag.CONE_AT_INFINITY}


@check("completion.ebin_table", "completion", 0.0, criterion=4)
def _cp_ebin(ctx, tol):
    """The Ebin conformal table for p in {1, 0, -1, 2}, and the matching pair tags."""
    bad, detail = 0, {}
    for n in (2, 3, 6):
        for p, want in CR_TABLE.items():
            got = cp.ebin_class(n, p)
            tag = cp.classify_pair(n / 2.0, power(-p)).tag
            detail[f"n={n},p={p:g}"] = [got.label.value, tag.value]
            bad += int(got.label is not want) + int(tag is not CR_TAGS[p])
    return float(bad), detail


@check("completion.examples", "completion", 0.0)
def _cp_examples(ctx, tol):
    """Worked classification examples in k-mode and v-mode."""
    T = cp.CompletionTag
    cases = [
        (cp.TTransform(constant(1.0)), T.CYLINDER),
        (cp.TTransform(power(1.0)), T.CONE_AT_ZERO),
        (cp.TTransform(from_function(lambda r: r / (1 + r) ** 2)), T.SUSPENSION),
        (cp.TTransform(constant(1.0), "v"), T.CONE_AT_ZERO),
        (cp.TTransform(power(-1.0), "v"), T.CYLINDER),
        (cp.TTransform(power(-2.0), "v"), T.CONE_AT_INFINITY),
    ]
    got = [cp.classify(t).tag for t, _ in cases]
    return float(sum(g is not w for g, (_, w) in zip(got, cases))), {"tags": [g.value for g in got]}


@check("completion.inversion_duality", "completion", 0.0)
def _cp_dual(ctx, tol):
    """w -> w(1/.) swaps ConeAtZero and ConeAtInfinity and fixes the other classes."""
    from .profiles import inverted

    T = cp.CompletionTag
    swap = {T.CONE_AT_ZERO: T.CONE_AT_INFINITY, T.CONE_AT_INFINITY: T.CONE_AT_ZERO}
    bad = 0
    profs = [constant(1.0), power(1.0), power(-0.5), csc.solve_csc_profile(1.0, 1.0, 0.25), from_function(lambda r: r / (1 + r) ** 2)]
    for w in profs:
        a = cp.classify(cp.TTransform(w)).tag
        b = cp.classify(cp.TTransform(inverted(w))).tag
        bad += int(b is not swap.get(a, a))
    return float(bad), {}


@check("completion.power_beta", "completion", 0.0)
def _cp_beta(ctx, tol):
    """classify_pair(v = r^beta) by exponents and by quadrature agree with the expected tags."""
    T = cp.CompletionTag
    bad, detail = 0, {}
    for beta in (-2.0, -1.0, -0.5, 0.0, 1.0):
        want = T.CONE_AT_ZERO if beta > -1 else (T.CYLINDER if beta == -1 else T.CONE_AT_INFINITY)
        a = cp.classify_pair(1.5, power(beta)).tag
        b = cp.classify_pair(1.5, from_function(lambda r, b=beta: r**b)).tag
        detail[f"{beta:g}"] = [a.value, b.value]
        # untagged profiles cannot confirm a vanishing limit at a side where it is 1
        bad += int(a is not want)
        bad += int(cp.limit_behavior(cp.TTransform(from_function(lambda r, b=beta: r**b), "v")).T0.kind
                   is not cp.limit_behavior(cp.TTransform(power(beta), "v")).T0.kind)
        bad += int(cp.limit_behavior(cp.TTransform(from_function(lambda r, b=beta: r**b), "v")).Tinf.kind
                   is not cp.limit_behavior(cp.TTransform(power(beta), "v")).Tinf.kind)
    return float(bad), detail


@check("completion.quadrature_vs_exponent", "completion", 0.0)
def _cp_quad(ctx, tol):
    """Bracket quadrature agrees with exponent verdicts on power laws, with no Inconclusive."""
    bad, detail = 0, {}
    for p in (-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0):
        for mode in ("k", "v"):
            ta = cp.limit_behavior(cp.TTransform(power(p), mode))
            tb = cp.limit_behavior(cp.TTransform(from_function(lambda r, p=p: r**p), mode))
            for side in ("T0", "Tinf"):
                ea, eb = getattr(ta, side), getattr(tb, side)
                ok = ea.kind is eb.kind
                if ok and ea.kind is cp.Finiteness.FINITE:
                    ok = abs(ea.value - eb.value) < 1e-6
                if not ok:
                    bad += 1
                    detail[f"{mode}:{p:g}:{side}"] = [ea.to_dict(), eb.to_dict()]
    return float(bad), detail


def _random_path(rng, W):
    n = int(rng.integers(2, 6))
    rs = np.exp(rng.uniform(-1.5, 1.5, n))
    ys = W.fiber.sample(rng, n)
    return np.column_stack([rs, ys])


@check("completion.length_lower_bound", "completion", 1e-8, criterion=9)
def _cp_length(ctx, tol):
    """L(c) >= |T(r1) - T(r0)| on 100 random paths per shipped metric; residual is the largest violation."""
    rng = ctx.rng("completion.length_lower_bound")
    detail, worst = {}, 0.0
    for name, W in shipped_warped().items():
        wv = 0.0
        for _ in range(ctx.n(100)):
            rep = cp.length_lower_bound_check(W, _random_path(rng, W), slack=0.0)
            wv = max(wv, rep.bound - rep.length)
        detail[name] = wv
        worst = max(worst, wv)
    return max(worst, 0.0), detail


@check("completion.radial_tightness", "completion", 1e-8)
def _cp_radial(ctx, tol):
    """For radial segments the length equals the T-difference."""
    worst = 0.0
    for W in shipped_warped().values():
        rep = cp.length_lower_bound_check(W, [[0.3, 0.1, 0.5], [2.5, 0.1, 0.5]])
        worst = max(worst, abs(rep.length - rep.bound))
    return worst, {}


def _cone_at_zero_metrics():
    return {
        "flat_cone_sphere": WarpedMetric(0.25, power(1.0), sphere(2)),
        "power2_flat": WarpedMetric(1.0, power(2.0), flat(2)),
        "power_half_hyperbolic": WarpedMetric(1.0, power(0.5), hyperbolic(2)),
    }


@check("completion.diameter_bound", "completion", 1e-6, criterion=9)
def _cp_diam(ctx, tol):
    """Comparison-path length <= T(r0) + T(r1) - 2 T0 on 20 point pairs per ConeAtZero metric."""
    rng = ctx.rng("completion.diameter_bound")
    detail, worst = {}, 0.0
    for name, W in _cone_at_zero_metrics().items():
        if cp.classify_warped(W).tag is not cp.CompletionTag.CONE_AT_ZERO:
            return math.inf, {name: "not ConeAtZero"}
        pts = [(np.r_[math.exp(rng.uniform(-1, 1)), W.fiber.sample(rng, 1)[0]], np.r_[math.exp(rng.uniform(-1, 1)), W.fiber.sample(rng, 1)[0]]) for _ in range(ctx.n(20))]
        reps = cp.diameter_bound_check(W, pts, "0", slack=tol)
        wv = max(r.best_length - r.bound for r in reps)
        detail[name] = wv
        worst = max(worst, wv)
    return max(worst, 0.0), detail


@check("completion.diameter_bound_suspension", "completion", 1e-6)
def _cp_diam_susp(ctx, tol):
    """A Suspension-class profile satisfies both diameter bounds."""
    rng = ctx.rng("completion.diameter_bound_suspension")
    W = WarpedMetric(1.0, csc.solve_csc_profile(1.0, 1.0, 0.25), sphere(2))
    pts = [(np.r_[math.exp(rng.uniform(-1, 1)), W.fiber.sample(rng, 1)[0]], np.r_[math.exp(rng.uniform(-1, 1)), W.fiber.sample(rng, 1)[0]]) for _ in range(ctx.n(5))]
    worst = 0.0
    for side in ("0", "inf"):
        for r in cp.diameter_bound_check(W, pts, side, slack=tol):
            worst = max(worst, r.best_length - r.bound)
    return max(worst, 0.0), {}


# --------------------------------------------------------------------------
# cli / descriptors


def _descriptor_dir() -> Optional[Path]:
    env = os.environ.get("WARPGEO_DESCRIPTORS")
    if env:
        return Path(env)
    p = Path(__file__).resolve().parents[2] / "descriptors"
    return p if p.is_dir() else None


@check("cli.descriptor_roundtrip", "cli", 0.0)
def _cli_roundtrip(ctx, tol):
    """Shipped descriptors survive parse -> serialize -> parse."""
    from . import descriptors as ds

    d = _descriptor_dir()
    if d is None:
        return 0.0, {"note": "no descriptor directory found"}
    bad = []
    files = sorted(d.glob("*.json"))
    for f in files:
        a = ds.parse(f)
        b = ds.parse(ds.serialize(a))
        if a != b:
            bad.append(f.name)
    return float(len(bad)), {"files": len(files), "mismatched": bad}


# --------------------------------------------------------------------------
# runner


def default_threads() -> int:
    n = os.cpu_count() or 1
    cap = os.environ.get("WARPGEO_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n


def run_check(chk: Check, ctx: VerifyContext) -> CheckResult:
    tol = chk.tol if ctx.tol is None else float(ctx.tol)
    t0 = time.perf_counter()
    try:
        res, detail = chk.fn(ctx, tol)
        res = float(res)
        err = None
    except Exception as e:  # a crashing check is a failing check
        res, detail, err = math.inf, {}, f"{type(e).__name__}: {e}"
    passed = bool(np.isfinite(res) and res <= tol)
    return CheckResult(chk.name, chk.module, chk.criterion, passed, res, tol, time.perf_counter() - t0, _jsonable(detail), err)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def select(only=None) -> list[Check]:
    if not only:
        return list(REGISTRY)
    pats = [only] if isinstance(only, str) else list(only)
    return [c for c in REGISTRY if any(c.name.startswith(p) or c.module == p for p in pats)]


def run_suite(ctx: VerifyContext | None = None, only=None, threads: int | None = None) -> list[CheckResult]:
    """Run the selected checks; results come back in registry order."""
    ctx = VerifyContext() if ctx is None else ctx
    checks = select(only)
    threads = default_threads() if threads is None else max(1, threads)
    if threads == 1:
        return [run_check(c, ctx) for c in checks]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(lambda c: run_check(c, ctx), checks))


def summarize(results: list[CheckResult], seed: int) -> dict:
    return {
        "seed": seed,
        "passed": all(r.passed for r in results),
        "n_checks": len(results),
        "n_failed": sum(not r.passed for r in results),
        "checks": [r.to_dict() for r in results],
    }
