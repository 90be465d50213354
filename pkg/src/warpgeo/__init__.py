"""Warped-product and homogeneous-pair geometry with numerical oracles."""

from . import completion, core, csc, descriptors, errors, fibers, geodesics, pairs, profiles, verify, warped
from .completion import (
    CompletionClass,
    CompletionTag,
    TTransform,
    classify,
    classify_pair,
    classify_warped,
    diameter_bound_check,
    ebin_class,
    length_lower_bound_check,
)
from .core import MetricField, constant_metric, euclidean, integrate_geodesic, sectional_curvature_fd
from .csc import CscParams, Regime, csc_profile, regime_of, solve_csc_profile
from .errors import DescriptorError, MathDomainError, WarpGeoError
from .fibers import FiberManifold
from .geodesics import GeodesicInit, conservation_residuals, explicit_geodesic
from .pairs import HomogeneousPair, hessian_cone_pair, pair_geodesic, split, verify_pair
from .profiles import RadialProfile, constant, from_function, from_table, power
from .verify import VerifyContext, run_suite
from .warped import WarpedMetric, csc_check, k_fiber, k_general, k_radial

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
