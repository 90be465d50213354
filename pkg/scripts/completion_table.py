#!/usr/bin/env python3
"""Completion classes for the conformal Ebin family and for sample profiles.

Part one tabulates the label and completion class of v = r^-p for a range of
p and dimensions.  Part two classifies a few warped profiles, tagged and
untagged, and shows which finiteness method decided each end.
"""
import argparse
import sys

import numpy as np

from warpgeo.completion import TTransform, classify, ebin_class
from warpgeo.csc import solve_csc_profile
from warpgeo.errors import Inconclusive
from warpgeo.profiles import constant, from_function, power

SAMPLES = {
    "constant": constant(1.0),
    "r^2": power(2.0),
    "r^-1": power(-1.0),
    "cosh family": solve_csc_profile(1.0, 1.0, 1.0),
    "r^2 (untagged)": from_function(lambda r: r**2),
    "r^2/(1+r^2)^2": from_function(lambda r: r**2 / (1 + r**2) ** 2),
    "1/(1+log^2(1+r))": from_function(lambda r: 1 / (1 + np.log(1 + r) ** 2)),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--p", type=float, nargs="+", default=[-2, -1, 0, 0.5, 1, 1.5, 2, 3])
    args = ap.parse_args()
    print(f"{'n':>3} {'p':>6}  {'label':<24} class")
    for n in args.dims:
        for p in args.p:
            try:
                res = ebin_class(n, p)
                print(f"{n:3d} {p:6.2f}  {res.label.value:<24} {res.completion.tag.value}")
            except Inconclusive as e:
                print(f"{n:3d} {p:6.2f}  {'-':<24} inconclusive ({e})")
    print()
    print(f"{'profile':<20} {'class':<16} {'T0':<26} Tinf")
    for name, w in SAMPLES.items():
        c = classify(TTransform(w))
        b = c.behavior
        print(f"{name:<20} {c.tag.value:<16} {b.T0.kind.value + ' (' + b.T0.method + ')':<26} {b.Tinf.kind.value} ({b.Tinf.method})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
