#!/usr/bin/env python3
"""Residual report for the shipped Hessian pairs.

For each potential: homogeneity and Euler residuals for (g, f) and (g_hat, f),
flatness of g, agreement of g_hat with -f Dd log f, the level-set curvature
relation, and the splitting pullback residual for a few conformal factors.
"""
import argparse
import sys

import numpy as np

from warpgeo import pairs as pr
from warpgeo.core import riemann_fd
from warpgeo.csc import solve_csc_profile
from warpgeo.profiles import constant, power

POTENTIALS = [pr.quadratic(2), pr.quadratic(3), pr.quadratic(4), pr.product2d(), pr.maschke(), pr.lorentz_quadratic(3)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    vs = {"1": constant(1.0), "r": power(1.0), "r^-2": power(-2.0), "cosh": solve_csc_profile(1.0, 1.0, 1.0)}
    print(f"{'potential':<12} {'verify':>9} {'verify^':>9} {'flat':>9} {'hat':>9} {'level':>9} {'split':>9}")
    for pot in POTENTIALS:
        P, Q = pr.hessian_cone_pair(pot)
        rp = pr.verify_pair(P, args.samples, rng)
        rq = pr.verify_pair(Q, args.samples, rng)
        xs = P.sample(rng, args.samples)
        flat = max(np.linalg.norm(riemann_fd(P.g, x)) for x in xs)
        hat = max(np.max(np.abs(pr.hat_metric_field(P)(x) - Q.g(x))) for x in xs)
        level = "-"
        if P.dim >= 3:
            level = f"{pr.level_curvature_relation(P, float(P.f(P.probe)), args.samples, rng).max_residual:9.2e}"
        split = 0.0
        for v in vs.values():
            sp = pr.split(P, float(P.f(P.probe)), v)
            for x in xs:
                z = sp.psi_inv(x)
                split = max(split, sp.pullback_residual(z[0], z[1:]))
        res_p = max(rp.homog_g, rp.homog_f, rp.euler, rp.df_P)
        res_q = max(rq.homog_g, rq.homog_f, rq.euler, rq.df_P)
        print(f"{pot.name:<12} {res_p:9.2e} {res_q:9.2e} {flat:9.2e} {hat:9.2e} {level:>9} {split:9.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
