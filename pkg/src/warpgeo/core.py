"""Chart-level pseudo-Riemannian geometry with finite-difference curvature.

Metric evaluators are vectorized: ``g.fn(x)`` takes an array of shape
``(..., dim)`` and returns ``(..., dim, dim)``.  All finite-difference
stencils are evaluated in one batched call.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import DOP853, RK45
from scipy.optimize import brentq

from .errors import (
    ChartExit,
    DegenerateMetric,
    DegeneratePlane,
    IllConditioned,
    MathDomainError,
    StepUnderflow,
)

EPS = np.finfo(float).eps
H1_SCALE = EPS ** (1.0 / 3.0)
H2_SCALE = EPS ** (1.0 / 4.0)
DEGENERACY_RTOL = 1e-10
COND_MAX = 1e12
PLANE_RTOL = 1e-12


@dataclass(frozen=True)
class MetricField:
    """A metric on a single chart.

    ``domain`` (optional) returns a signed margin, positive inside the chart;
    geodesic integration stops when it crosses zero.
    """

    dim: int
    fn: Callable[[np.ndarray], np.ndarray]
    signature: Optional[tuple[int, int]] = None
    domain: Optional[Callable[[np.ndarray], float]] = None
    name: str = ""

    def __call__(self, x) -> np.ndarray:
        return self.fn(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class GeodesicState:
    position: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.position, dtype=float)
        v = np.asarray(self.velocity, dtype=float)
        if p.shape != v.shape:
            raise ValueError("velocity must be based at position (shape mismatch)")
        object.__setattr__(self, "position", p)
        object.__setattr__(self, "velocity", v)


def constant_metric(matrix, name: str = "") -> MetricField:
    m = np.asarray(matrix, dtype=float)
    dim = m.shape[0]

    def fn(x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(m, x.shape[:-1] + (dim, dim)).copy()

    return MetricField(dim, fn, signature=signature_of(m), name=name)


def euclidean(dim: int) -> MetricField:
    return constant_metric(np.eye(dim), name=f"euclidean{dim}")


def signature_of(matrix) -> tuple[int, int]:
    ev = np.linalg.eigvalsh(np.asarray(matrix, dtype=float))
    return int(np.sum(ev > 0)), int(np.sum(ev < 0))


def check_nondegenerate(gx: np.ndarray) -> None:
    """Scale-aware degeneracy test: |det g| < 1e-10 * ||g||_1^dim."""
    dim = gx.shape[-1]
    norm1 = np.abs(gx).sum(axis=-2).max(axis=-1)
    det = np.linalg.det(gx)
    bad = (np.abs(det) < DEGENERACY_RTOL * norm1**dim) | ~np.isfinite(det)
    if np.any(bad):
        raise DegenerateMetric("metric is degenerate at a sample point")


def default_steps(x: np.ndarray, scale: float) -> np.ndarray:
    return scale * np.maximum(1.0, np.abs(x))


def _first_stencil(x, h):
    dim = x.size
    pts = np.empty((2 * dim, dim))
    for k in range(dim):
        pts[2 * k] = x
        pts[2 * k + 1] = x
        pts[2 * k, k] += h[k]
        pts[2 * k + 1, k] -= h[k]
    return pts


def metric_derivatives(g: MetricField, x, h1=None, h2=None, second=True):
    """Return ``(g(x), dg, ddg)`` with ``dg[k,i,j] = d_k g_ij`` and
    ``ddg[k,l,i,j] = d_k d_l g_ij`` from central differences."""
    x = np.asarray(x, dtype=float)
    dim = x.size
    h1 = default_steps(x, H1_SCALE) if h1 is None else np.broadcast_to(h1, (dim,))
    pts = [x[None, :], _first_stencil(x, h1)]
    if second:
        h2 = default_steps(x, H2_SCALE) if h2 is None else np.broadcast_to(h2, (dim,))
        pts.append(_first_stencil(x, h2))
        pairs = [(k, l) for k in range(dim) for l in range(k + 1, dim)]
        mixed = np.empty((4 * len(pairs), dim))
        for n, (k, l) in enumerate(pairs):
            for m, (sk, sl) in enumerate(((1, 1), (1, -1), (-1, 1), (-1, -1))):
                p = x.copy()
                p[k] += sk * h2[k]
                p[l] += sl * h2[l]
                mixed[4 * n + m] = p
        pts.append(mixed)
    allpts = np.concatenate(pts, axis=0)
    vals = g(allpts)
    check_nondegenerate(vals)
    g0 = vals[0]
    first = vals[1 : 1 + 2 * dim]
    dg = (first[0::2] - first[1::2]) / (2.0 * h1[:, None, None])
    if not second:
        return g0, dg, None
    off = 1 + 2 * dim
    sec = vals[off : off + 2 * dim]
    ddg = np.empty((dim, dim, dim, dim))
    for k in range(dim):
        ddg[k, k] = (sec[2 * k] - 2.0 * g0 + sec[2 * k + 1]) / h2[k] ** 2
    off += 2 * dim
    for n, (k, l) in enumerate(pairs):
        q = vals[off + 4 * n : off + 4 * n + 4]
        d = (q[0] - q[1] - q[2] + q[3]) / (4.0 * h2[k] * h2[l])
        ddg[k, l] = d
        ddg[l, k] = d
    return g0, dg, ddg


def _christoffel_from(ginv, dg):
    # Gamma^i_{jk} = 1/2 g^{il} (d_j g_lk + d_k g_lj - d_l g_jk)
    t = dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg
    # t[l, j, k]: d_j g_lk + d_k g_lj - d_l g_jk
    return 0.5 * np.einsum("il,ljk->ijk", ginv, t)


def christoffel_fd(g: MetricField, x, h=None) -> np.ndarray:
    """Christoffel symbols ``G[i, j, k] = Gamma^i_{jk}`` at ``x``."""
    g0, dg, _ = metric_derivatives(g, x, h1=h, second=False)
    return _christoffel_from(np.linalg.inv(g0), dg)


def riemann_fd(g: MetricField, x, h=None) -> np.ndarray:
    """Curvature array ``R[i, j, k, l] = R^i_{jkl}`` with
    ``R(d_k, d_l) d_j = R^i_{jkl} d_i`` and ``R(A,B) = [nabla_A, nabla_B] - nabla_[A,B]``.

    ``h`` overrides the second-difference step; first differences keep the
    default cube-root step.
    """
    g0, dg, ddg = metric_derivatives(g, x, h2=h)
    if np.linalg.cond(g0) > COND_MAX:
        raise IllConditioned("metric condition number exceeds threshold")
    ginv = np.linalg.inv(g0)
    gam = _christoffel_from(ginv, dg)
    # d_m g^{il} = -g^{ia} d_m g_ab g^{bl}
    dginv = -np.einsum("ia,mab,bl->mil", ginv, dg, ginv)
    t = dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg
    # dt[m, l, j, k] = d_m(d_j g_lk + d_k g_lj - d_l g_jk)
    dt = ddg.transpose(0, 2, 1, 3) + ddg.transpose(0, 2, 3, 1) - ddg
    dgam = 0.5 * (np.einsum("mil,ljk->mijk", dginv, t) + np.einsum("il,mljk->mijk", ginv, dt))
    # A[i,j,k,l] = d_k Gamma^i_{lj} + Gamma^i_{km} Gamma^m_{lj}
    a = dgam.transpose(1, 3, 0, 2) + np.einsum("ikm,mlj->ijkl", gam, gam)
    return a - a.transpose(0, 1, 3, 2)


def lower_riemann(g0: np.ndarray, R: np.ndarray) -> np.ndarray:
    """``R_{ijkl} = g_{im} R^m_{jkl}``."""
    return np.einsum("im,mjkl->ijkl", g0, R)


def plane_gram(g0, a, b) -> float:
    return float((a @ g0 @ a) * (b @ g0 @ b) - (a @ g0 @ b) ** 2)


def check_plane(g0, a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    den = plane_gram(g0, a, b)
    scale = abs(a @ g0 @ a) * abs(b @ g0 @ b) + (a @ g0 @ b) ** 2
    scale = max(scale, np.abs(g0).max() ** 2 * (a @ a) * (b @ b))
    if abs(den) <= PLANE_RTOL * scale or scale == 0.0:
        raise DegeneratePlane("plane spanned by a, b is degenerate")
    return den


def sectional_from_riemann(g0, R, a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    den = check_plane(g0, a, b)
    rbb = np.einsum("ijkl,j,k,l->i", R, b, a, b)
    return float(a @ g0 @ rbb) / den


def sectional_curvature_fd(g: MetricField, x, a, b, h=None) -> float:
    x = np.asarray(x, dtype=float)
    g0 = g(x)
    check_nondegenerate(g0)
    check_plane(g0, np.asarray(a, float), np.asarray(b, float))
    R = riemann_fd(g, x, h=h)
    return sectional_from_riemann(g0, R, a, b)


def sectional_curvature_fd_richardson(g: MetricField, x, a, b) -> float:
    """Sectional curvature with one Richardson step on the default second-difference step.

    Cancels the O(h^2) truncation term, which dominates where the metric
    varies on scales much shorter than |x| (next to profile poles).
    """
    x = np.asarray(x, dtype=float)
    h = default_steps(x, H2_SCALE)
    k1 = sectional_curvature_fd(g, x, a, b, h=h)
    k2 = sectional_curvature_fd(g, x, a, b, h=h / 2)
    return (4.0 * k2 - k1) / 3.0


def geodesic_rhs(g: MetricField):
    dim = g.dim

    def rhs(t, s):
        x, v = s[:dim], s[dim:]
        gam = christoffel_fd(g, x)
        acc = -np.einsum("ijk,j,k->i", gam, v, v)
        return np.concatenate([v, acc])

    return rhs


@dataclass
class Trajectory:
    """Dense geodesic output.

    ``t``, ``x``, ``v`` are sampled on a uniform grid over the integrated
    interval; ``__call__`` evaluates the adaptive-step interpolant anywhere in
    that interval.
    """

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    status: str
    speed: np.ndarray
    t_reached: float
    _segments: list = field(default_factory=list, repr=False)

    @property
    def exited(self) -> bool:
        return self.status != "ok"

    @property
    def speed_drift(self) -> float:
        return float(np.max(np.abs(self.speed - self.speed[0]))) if self.speed.size else 0.0

    def __call__(self, tq):
        tq = np.atleast_1d(np.asarray(tq, dtype=float))
        out = np.empty((tq.size, self.x.shape[1] * 2))
        starts = np.array([s.t_min for s in self._segments])
        sign = 1.0 if self.t_reached >= 0 else -1.0
        for n, tt in enumerate(tq):
            if sign > 0:
                idx = max(0, np.searchsorted(starts, tt, side="right") - 1)
            else:
                idx = max(0, np.searchsorted(-starts, -tt, side="right") - 1)
            idx = min(idx, len(self._segments) - 1)
            out[n] = self._segments[idx](tt)
        dim = self.x.shape[1]
        return out[:, :dim], out[:, dim:]


def integrate_geodesic(
    g: MetricField,
    s0: GeodesicState,
    t_end: float,
    tol: float = 1e-10,
    n_samples: int = 256,
    strict: bool = False,
    max_steps: int = 200_000,
    method: str = "DOP853",
) -> Trajectory:
    """Integrate the geodesic equation with an adaptive embedded RK pair
    (``method`` is "DOP853" or "RK45").

    On leaving the chart (domain margin crosses zero, or the metric becomes
    degenerate) the partial trajectory is returned with ``status='chart_exit'``;
    with ``strict=True`` a ``ChartExit`` carrying it is raised instead.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    dim = g.dim
    y0 = np.concatenate([s0.position, s0.velocity])
    rhs = geodesic_rhs(g)
    try:
        stepper = {"DOP853": DOP853, "RK45": RK45}[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}") from None
    solver = stepper(rhs, 0.0, y0, t_end, rtol=tol, atol=tol)
    segments = []
    status = "ok"
    steps = 0
    t_exit = None

    def inside(y):
        return g.domain is None or g.domain(y[:dim]) > 0

    margin0 = None if g.domain is None else float(g.domain(s0.position))

    while solver.status == "running":
        try:
            msg = solver.step()
        except (MathDomainError, np.linalg.LinAlgError, FloatingPointError):
            status = "chart_exit"
            break
        if solver.status == "failed":
            if _near_boundary(g, solver.y[:dim], margin0):
                status = "chart_exit"
                break
            raise StepUnderflow(f"step size underflow: {msg}")
        if not inside(solver.y) or not np.all(np.isfinite(solver.y)):
            status = "chart_exit"
            t_exit = _locate_exit(g, solver)
            if t_exit is not None:
                segments.append(solver.dense_output())
                t_reached = t_exit
            break
        seg = solver.dense_output()
        segments.append(seg)
        steps += 1
        if steps > max_steps:
            raise StepUnderflow("maximum number of steps exceeded")
    if t_exit is None:
        # otherwise back off onto the last accepted step
        t_reached = segments[-1].t_max if segments else 0.0
    traj = _sample(g, segments, y0, t_reached, n_samples, status)
    if status != "ok" and strict:
        raise ChartExit("trajectory left the chart domain", traj)
    return traj


def _locate_exit(g, solver):
    """Root of the domain margin inside the last step, nudged back inside."""
    if g.domain is None:
        return None
    seg = solver.dense_output()
    dim = g.dim

    def margin(t):
        return float(g.domain(seg(t)[:dim]))

    t0, t1 = solver.t_old, solver.t
    try:
        if not margin(t0) > 0 or not np.isfinite(margin(t1)) or margin(t1) > 0:
            return None
        ts = brentq(margin, t0, t1, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    except (ValueError, MathDomainError, FloatingPointError):
        return None
    return t0 + (ts - t0) * (1.0 - 1e-12)


def _near_boundary(g, x, margin0) -> bool:
    """Step failure next to a degenerate or vanishing-margin region counts as leaving the chart."""
    if margin0 is not None and margin0 > 0 and g.domain(x) < 1e-6 * margin0:
        return True
    try:
        return bool(np.linalg.cond(g(x)) > COND_MAX / 1e4)
    except np.linalg.LinAlgError:
        return True


def _sample(g, segments, y0, t_reached, n_samples, status) -> Trajectory:
    dim = g.dim
    ts = np.linspace(0.0, t_reached, n_samples)
    if not segments:
        xs = np.repeat(y0[None, :dim], n_samples, axis=0)
        vs = np.repeat(y0[None, dim:], n_samples, axis=0)
    else:
        traj = Trajectory(ts, np.zeros((1, dim)), np.zeros((1, dim)), status, np.zeros(0), t_reached, segments)
        xs, vs = traj(ts)
    gm = g(xs)
    speed = np.einsum("ni,nij,nj->n", vs, gm, vs)
    return Trajectory(ts, xs, vs, status, speed, t_reached, segments)
