"""Warped metrics g(w) = (k w(r)/r^2) dr^2 + w(r) g_Y and their curvature.

Closed forms for a one-dimensional base.  With xi = k w / r^2 and rho = sqrt(w):

    K(d_r)   = (-2 rho'' xi + rho' xi') / (2 rho xi^2)
    K(a, b)  = (K_Y(a, b) - rho'^2 / xi) / rho^2
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import MetricField, check_plane, plane_gram
from .errors import DegeneratePlane, NotDefinite
from .fibers import FiberManifold
from .profiles import RadialProfile


@dataclass(frozen=True)
class WarpedMetric:
    k: float
    profile: RadialProfile
    fiber: FiberManifold

    def __post_init__(self):
        if self.k == 0:
            raise ValueError("k must be nonzero")

    @property
    def dim(self) -> int:
        return 1 + self.fiber.dim

    def xi(self, r):
        return self.k * self.profile(r) / r**2

    def radial_terms(self, r):
        """Return (xi, xi', rho, rho', rho'') at r."""
        w = self.profile(r)
        w1 = self.profile.deriv1(r)
        w2 = self.profile.deriv2(r)
        xi = self.k * w / r**2
        dxi = self.k * (w1 / r**2 - 2 * w / r**3)
        rho = np.sqrt(w)
        drho = w1 / (2 * rho)
        ddrho = w2 / (2 * rho) - w1**2 / (4 * w * rho)
        return xi, dxi, rho, drho, ddrho

    @property
    def signature(self):
        fs = self.fiber.metric.signature
        if fs is None:
            return None
        p, q = fs
        return (1 + p, q) if self.k > 0 else (p, 1 + q)

    @property
    def definite(self) -> bool:
        sig = self.signature
        return sig is not None and (sig[0] == 0 or sig[1] == 0)


def as_metric_field(W: WarpedMetric) -> MetricField:
    """Block-diagonal metric on the chart (r, y)."""
    n = W.dim
    fiber_metric = W.fiber.metric

    def fn(x):
        x = np.asarray(x, dtype=float)
        r = x[..., 0]
        w = W.profile(r)
        out = np.zeros(x.shape[:-1] + (n, n))
        out[..., 0, 0] = W.k * w / r**2
        out[..., 1:, 1:] = w[..., None, None] * fiber_metric(x[..., 1:])
        return out

    fdom = fiber_metric.domain

    def domain(x):
        m = float(x[0])
        if fdom is not None:
            m = min(m, fdom(x[1:]))
        return m

    return MetricField(n, fn, signature=W.signature, domain=domain, name=f"warped(k={W.k:g},{W.profile.label},{W.fiber.name})")


def k_radial(W: WarpedMetric, r):
    """Sectional curvature of any plane containing d_r."""
    xi, dxi, rho, drho, ddrho = W.radial_terms(r)
    return (-2 * ddrho * xi + drho * dxi) / (2 * rho * xi**2)


def mixed_curvature_coefficient(W: WarpedMetric, r):
    """g(R(d_r, a) b, d_r) / g(a, b)."""
    xi, dxi, rho, drho, ddrho = W.radial_terms(r)
    return (-2 * ddrho * xi + drho * dxi) / (2 * rho * xi)


def fiber_shift(W: WarpedMetric, r, K_fiber):
    xi, dxi, rho, drho, ddrho = W.radial_terms(r)
    return (K_fiber - drho**2 / xi) / rho**2


def k_fiber(W: WarpedMetric, r, a, b, y=None) -> float:
    """Sectional curvature of a plane spanned by fiber vectors a, b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if y is None:
        y = W.fiber.base_point()
    gy = W.fiber.metric(y)
    check_plane(gy, a, b)
    return float(fiber_shift(W, r, W.fiber.sectional(y, a, b)))


def _dependent(a, b, gy) -> bool:
    na = np.sqrt(abs(a @ a))
    nb = np.sqrt(abs(b @ b))
    if na == 0.0 or nb == 0.0:
        return True
    m = np.stack([a / na, b / nb])
    sv = np.linalg.svd(m, compute_uv=False)
    return sv[-1] < 1e-12 * sv[0]


def k_general(W: WarpedMetric, r, y, A, B) -> float:
    """Sectional curvature of span{A, B}, A = k1 d_r + a, B = k2 d_r + b."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    y = np.asarray(y, dtype=float)
    k1, a = A[0], A[1:]
    k2, b = B[0], B[1:]
    w = float(W.profile(r))
    gy = W.fiber.metric(y)
    G = w * gy
    xi = float(W.xi(r))
    full = np.zeros((W.dim, W.dim))
    full[0, 0] = xi
    full[1:, 1:] = G
    check_plane(full, A, B)
    kr = float(k_radial(W, r))
    if _dependent(a, b, gy):
        return kr
    c = k2 * a - k1 * b
    wr = xi * (c @ G @ c)
    wf = plane_gram(G, a, b)
    kf = float(fiber_shift(W, r, W.fiber.sectional(y, a, b)))
    den = wr + wf
    if den == 0.0:
        raise DegeneratePlane("plane spanned by A, B is degenerate")
    return (kr * wr + kf * wf) / den


@dataclass
class CscReport:
    passed: bool
    C: float
    max_radial_residual: float
    max_fiber_residual: float
    radii: np.ndarray = field(repr=False)
    tol: float = 1e-5

    def to_dict(self):
        return {
            "pass": self.passed,
            "C": self.C,
            "max_radial_residual": self.max_radial_residual,
            "max_fiber_residual": self.max_fiber_residual,
            "tol": self.tol,
        }


def sample_radii(W: WarpedMetric, rng, n, lo=0.2, hi=5.0):
    """Log-uniform radii in [lo, hi] kept away from profile poles."""
    out = []
    while len(out) < n:
        r = float(np.exp(rng.uniform(np.log(lo), np.log(hi))))
        if W.profile.has_poles:
            ps = np.atleast_1d(W.profile.poles(r / 1.2, r * 1.2))
            if ps.size and np.min(np.abs(np.log(r / ps))) < 0.05:
                continue
        out.append(r)
    return np.array(out)


def random_plane(rng, dim):
    a = rng.normal(size=dim)
    b = rng.normal(size=dim)
    return a, b


def csc_check(W: WarpedMetric, C: float, n_samples: int = 20, rng=None, tol: float = 1e-5) -> CscReport:
    rng = np.random.default_rng(0) if rng is None else rng
    radii = sample_radii(W, rng, n_samples)
    rad = np.abs(np.array([k_radial(W, r) for r in radii]) - C)
    fib = np.zeros(0)
    if W.fiber.dim >= 2:
        vals = []
        for r in radii:
            y = W.fiber.sample(rng, 1)[0]
            a, b = random_plane(rng, W.fiber.dim)
            vals.append(abs(k_fiber(W, r, a, b, y) - C))
        fib = np.array(vals)
    mr = float(rad.max()) if rad.size else 0.0
    mf = float(fib.max()) if fib.size else 0.0
    return CscReport(bool(mr < tol and mf < tol), float(C), mr, mf, radii, tol)


@dataclass
class CurvatureBounds:
    lower: float
    upper: float
    r_range: tuple
    one_sided: str | None = None

    def as_tuple(self):
        return (self.lower, self.upper)


def curvature_bounds(W: WarpedMetric, fiber_K_range, n_r: int = 200, r_range=(1e-3, 1e3)) -> CurvatureBounds:
    """Sampled inf/sup of K over planes, for definite W.

    The radial curvature is sampled log-uniformly; fiber planes contribute the
    image of ``fiber_K_range`` under the fiber shift (affine in K_Y, so the
    endpoints suffice).  For constant-curvature-family profiles the exact
    one-sided bound C is returned when the fiber range allows it.
    """
    if not W.definite:
        raise NotDefinite("curvature bounds need a definite warped metric")
    lo_y, hi_y = map(float, fiber_K_range)
    rs = np.exp(np.linspace(np.log(r_range[0]), np.log(r_range[1]), n_r))
    if W.profile.has_poles:
        keep = []
        for r in rs:
            try:
                W.profile.check_pole(r)
                keep.append(r)
            except Exception:
                pass
        rs = np.array(keep)
    vals = [k_radial(W, rs)]
    if W.fiber.dim >= 2:
        vals.append(fiber_shift(W, rs, lo_y))
        vals.append(fiber_shift(W, rs, hi_y))
    allv = np.concatenate([np.atleast_1d(v) for v in vals])
    lower, upper = float(np.min(allv)), float(np.max(allv))
    one_sided = None
    params = W.profile.params or {}
    if W.profile.label.startswith("csc") and "s" in params:
        C = params["s"] / W.k
        shift = params["C1"] / W.k
        if W.fiber.dim < 2 or (lo_y >= shift and hi_y <= shift):
            lower, upper, one_sided = C, C, "=="
        elif lo_y >= shift:
            lower, one_sided = C, ">="
        elif hi_y <= shift:
            upper, one_sided = C, "<="
    return CurvatureBounds(lower, upper, (float(r_range[0]), float(r_range[1])), one_sided)
