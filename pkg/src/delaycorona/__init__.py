"""Corona and Bezout checks for finite Dirac-sum measures, and Hautus-type
controllability analysis of linear delayed difference equations."""

__version__ = "0.1.0"

from .bezout_solver import BezoutCertificate, bezout_from_measures, measure_bezout, poly_bezout
from .corona_checker import CoronaInstance, corona_decide, corona_decide_commensurable, corona_inf_estimate
from .delay_lattice import build_lattice, kronecker_approximate
from .hautus_checker import SystemSpec, cond_i_scan, cond_ii_check, h_eval, hautus_decide
from .lcdde_sim import build_reachability, frequency_consistency_check, simulate, steer
from .measure_algebra import DiracSumMeasure, PiecewiseConstantFunction, convolve, laplace_eval, tv_norm

__all__ = [
    "__version__",
    "BezoutCertificate",
    "CoronaInstance",
    "DiracSumMeasure",
    "PiecewiseConstantFunction",
    "SystemSpec",
    "bezout_from_measures",
    "build_lattice",
    "build_reachability",
    "cond_i_scan",
    "cond_ii_check",
    "convolve",
    "corona_decide",
    "corona_decide_commensurable",
    "corona_inf_estimate",
    "frequency_consistency_check",
    "h_eval",
    "hautus_decide",
    "kronecker_approximate",
    "laplace_eval",
    "measure_bezout",
    "poly_bezout",
    "simulate",
    "steer",
    "tv_norm",
]
