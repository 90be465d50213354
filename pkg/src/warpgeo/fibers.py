"""Built-in model fibers (Y, g_Y) with closed-form geodesics where known."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import GeodesicState, MetricField, constant_metric, integrate_geodesic, sectional_curvature_fd


@dataclass(frozen=True)
class FiberManifold:
    """A finite-dimensional fiber on one chart.

    ``geodesic(y0, v0, s)`` returns positions and velocities of the fiber
    geodesic at parameters ``s``; when absent, the ODE integrator is used.
    """

    dim: int
    metric: MetricField
    known_csc: Optional[float] = None
    name: str = "user"
    geodesic: Optional[Callable] = None
    sample_point: Optional[Callable] = None

    def sample(self, rng, n=1):
        if self.sample_point is not None:
            return self.sample_point(rng, n)
        return rng.uniform(-0.5, 0.5, size=(n, self.dim))

    def base_point(self) -> np.ndarray:
        """A fixed point inside the chart: the origin, or (0, .., 0, 1) in the half-space model."""
        y = np.zeros(self.dim)
        if self.metric.domain is not None and not self.metric.domain(y) > 0:
            y[-1] = 1.0
        return y

    def metric_at(self, y):
        return self.metric(y)

    def sectional(self, y, a, b) -> float:
        if self.known_csc is not None:
            return float(self.known_csc)
        return sectional_curvature_fd(self.metric, y, a, b)

    def geodesic_path(self, y0, v0, s, tol=1e-11):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if self.geodesic is not None:
            return self.geodesic(np.asarray(y0, float), np.asarray(v0, float), s)
        return ode_fiber_geodesic(self.metric, y0, v0, s, tol)

    @property
    def positive_definite(self) -> bool:
        sig = self.metric.signature
        return sig is not None and sig == (self.dim, 0)

    @property
    def definite(self) -> bool:
        sig = self.metric.signature
        return sig is not None and (sig[0] == 0 or sig[1] == 0)


def ode_fiber_geodesic(metric, y0, v0, s, tol=1e-11):
    s = np.atleast_1d(np.asarray(s, dtype=float))
    smax = float(np.max(np.abs(s))) if s.size else 0.0
    if smax == 0.0:
        return np.repeat(np.asarray(y0, float)[None], s.size, 0), np.repeat(np.asarray(v0, float)[None], s.size, 0)
    out_y = np.empty((s.size, metric.dim))
    out_v = np.empty((s.size, metric.dim))
    for sign in (1.0, -1.0):
        mask = (s >= 0) if sign > 0 else (s < 0)
        if not np.any(mask):
            continue
        end = float(np.max(np.abs(s[mask])))
        st = GeodesicState(np.asarray(y0, float), sign * np.asarray(v0, float))
        traj = integrate_geodesic(metric, st, end * 1.0000001, tol=tol, n_samples=2, strict=True)
        ys, vs = traj(np.abs(s[mask]))
        out_y[mask] = ys
        out_v[mask] = sign * vs
    return out_y, out_v


def flat(n: int) -> FiberManifold:
    def geo(y0, v0, s):
        return y0[None] + s[:, None] * v0[None], np.repeat(v0[None], s.size, 0)

    return FiberManifold(
        n,
        constant_metric(np.eye(n), name=f"flat{n}"),
        known_csc=0.0 if n >= 2 else None,
        name=f"flat{n}",
        geodesic=geo,
    )


def circle() -> FiberManifold:
    """The unit circle in its angle chart (flat, 1-dimensional)."""
    fib = flat(1)
    return FiberManifold(1, fib.metric, None, "circle", fib.geodesic)


def minkowski(n: int) -> FiberManifold:
    eta = np.diag([-1.0] + [1.0] * (n - 1))

    def geo(y0, v0, s):
        return y0[None] + s[:, None] * v0[None], np.repeat(v0[None], s.size, 0)

    return FiberManifold(
        n, constant_metric(eta, name=f"minkowski{n}"), known_csc=0.0 if n >= 2 else None, name=f"minkowski{n}", geodesic=geo
    )


# Round sphere through stereographic projection from the north pole.


def _sphere_metric(x):
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    conf = 4.0 / (1.0 + np.sum(x * x, axis=-1)) ** 2
    return conf[..., None, None] * np.eye(n)


def _stereo_to_embed(u, du):
    q = u @ u
    d = 1.0 + q
    X = np.concatenate([2 * u / d, [(q - 1) / d]])
    ud = u @ du
    dX = np.concatenate([2 * du / d - 4 * u * ud / d**2, [4 * ud / d**2]])
    return X, dX


def _embed_to_stereo(X, dX):
    n = X.shape[-1] - 1
    den = 1.0 - X[..., n]
    u = X[..., :n] / den[..., None]
    du = dX[..., :n] / den[..., None] + X[..., :n] * (dX[..., n] / den**2)[..., None]
    return u, du


def sphere(n: int = 2) -> FiberManifold:
    def geo(y0, v0, s):
        X, V = _stereo_to_embed(y0, v0)
        sp = np.linalg.norm(V)
        if sp == 0.0:
            return np.repeat(y0[None], s.size, 0), np.zeros((s.size, n))
        e = V / sp
        c = np.cos(sp * s)[:, None]
        sn = np.sin(sp * s)[:, None]
        Xs = X[None] * c + e[None] * sn
        Vs = sp * (-X[None] * sn + e[None] * c)
        return _embed_to_stereo(Xs, Vs)

    def domain_sample(rng, m):
        return rng.uniform(-0.6, 0.6, size=(m, n))

    def margin(y):
        return 50.0 - float(np.sum(np.asarray(y) ** 2))

    metric = MetricField(n, _sphere_metric, signature=(n, 0), domain=margin, name=f"sphere{n}")
    return FiberManifold(n, metric, known_csc=1.0 if n >= 2 else None, name=f"sphere{n}", geodesic=geo, sample_point=domain_sample)


# Hyperbolic upper half-space {x_n > 0} with metric |dx|^2 / x_n^2.


def _hyp_metric(x):
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    return (1.0 / x[..., -1] ** 2)[..., None, None] * np.eye(n)


def _half_to_hyperboloid(p, dp):
    x, y = p[:-1], p[-1]
    dx, dy = dp[:-1], dp[-1]
    q = x @ x + y * y
    X0 = (q + 1) / (2 * y)
    Xn = (q - 1) / (2 * y)
    dq = 2 * (x @ dx) + 2 * y * dy
    dX0 = dq / (2 * y) - (q + 1) * dy / (2 * y**2)
    dXn = dq / (2 * y) - (q - 1) * dy / (2 * y**2)
    Xi = x / y
    dXi = dx / y - x * dy / y**2
    return np.concatenate([[X0], Xi, [Xn]]), np.concatenate([[dX0], dXi, [dXn]])


def _hyperboloid_to_half(X, dX):
    X0, Xi, Xn = X[..., 0], X[..., 1:-1], X[..., -1]
    dX0, dXi, dXn = dX[..., 0], dX[..., 1:-1], dX[..., -1]
    den = X0 - Xn
    y = 1.0 / den
    dy = -(dX0 - dXn) / den**2
    x = Xi * y[..., None]
    dx = dXi * y[..., None] + Xi * dy[..., None]
    return np.concatenate([x, y[..., None]], axis=-1), np.concatenate([dx, dy[..., None]], axis=-1)


def hyperbolic(n: int = 2) -> FiberManifold:
    def geo(y0, v0, s):
        X, V = _half_to_hyperboloid(y0, v0)
        mink = -V[0] ** 2 + V[1:] @ V[1:]
        sp = np.sqrt(max(mink, 0.0))
        if sp == 0.0:
            return np.repeat(y0[None], s.size, 0), np.zeros((s.size, n))
        e = V / sp
        c = np.cosh(sp * s)[:, None]
        sn = np.sinh(sp * s)[:, None]
        Xs = X[None] * c + e[None] * sn
        Vs = sp * (X[None] * sn + e[None] * c)
        return _hyperboloid_to_half(Xs, Vs)

    def domain_sample(rng, m):
        pts = rng.uniform(-0.5, 0.5, size=(m, n))
        pts[:, -1] = rng.uniform(0.5, 2.0, size=m)
        return pts

    def margin(y):
        return float(np.asarray(y)[-1])

    metric = MetricField(n, _hyp_metric, signature=(n, 0), domain=margin, name=f"hyperbolic{n}")
    return FiberManifold(n, metric, known_csc=-1.0 if n >= 2 else None, name=f"hyperbolic{n}", geodesic=geo, sample_point=domain_sample)


def user_fiber(metric: MetricField, known_csc=None, name="user") -> FiberManifold:
    return FiberManifold(metric.dim, metric, known_csc, name)


BUILTIN = {
    "flat": flat,
    "circle": lambda n=1: circle(),
    "sphere": sphere,
    "hyperbolic": hyperbolic,
    "minkowski": minkowski,
}


def by_name(kind: str, dim: int = 2) -> FiberManifold:
    try:
        factory = BUILTIN[kind]
    except KeyError:
        raise ValueError(f"unknown fiber kind {kind!r}") from None
    return factory(dim)
