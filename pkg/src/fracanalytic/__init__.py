"""Fractional analytic function classes in the unit disk."""

from .classes import (
    ClassParams,
    ExtremePointWeights,
    KernelCoeffs,
    KernelFamily,
    Verdict,
    WeightVariant,
    coefficient_bound,
    coefficient_margin,
    decompose_extreme_points,
    extremal_function,
    extreme_point_combination,
    is_member,
    preset,
    xi_weight,
)
from .fps import DiskPoint, FractionalSeries, GeneralSeries, Sign, differentiate, evaluate, hadamard
from .operators import apply_D, frac_derivative, frac_derivative_higher, frac_integral, theta_series
from .reports import BoundReport

__version__ = "0.1.0"
