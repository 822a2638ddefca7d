"""Seeded random line-set models, interpolating functions through them,
and crossing-threshold experiments.

The public surface re-exports the main entry points of each module; see the
module docstrings for the constructions and their guarantees.
"""

__version__ = "0.1.0"

from .brownian import (ANCHOR_ID, DyadicPath, brownian_path,
                       displacement_variance, line_stream, mean_spacing,
                       midpoint_displacements, signed_displacement)
from .criteria import (ArcFamily, DivergentSubsetResult, ProbeFailedError,
                       ScanResult, SeriesDiagnostic, circle_uncovered,
                       dyadic_block_reversal, extract_divergent_subset,
                       rotating_cover_scan, series_partial_sums,
                       uncovered_measure)
from .interpolators import (Line, LevelRecord, PiecewiseLinearFunction,
                            StepFunction, TraceResult, continuous_interpolate,
                            greedy_trace, min_total_variation,
                            monotone_interpolate, trace_signs,
                            weighted_variation_diagnostic)
from .percolation import (BracketNotFoundError, BracketRecord, LambdaCResult,
                          McEstimate, SiteLattice, build_lattice,
                          crossing_probability, directed_crossing,
                          estimate_lambda_c, lipschitz_feasible,
                          periodic_feasible, scaling_report, strip_lines)
from .randomsets import (BooleanComplement, ExtensionBudgetError, LineModel,
                         NearestPoint, Periodic, Poisson, RealizedSet,
                         RenewalWeibull, RngStream, VoidRadius, ensure_window,
                         extend, from_points, intersects_interval,
                         max_void_radius, model_label, nearest, realize, thin,
                         write_csv)
from .selftest import run_selftest

__all__ = [
    "__version__",
    # randomsets
    "BooleanComplement", "ExtensionBudgetError", "LineModel", "NearestPoint",
    "Periodic", "Poisson", "RealizedSet", "RenewalWeibull", "RngStream",
    "VoidRadius", "ensure_window", "extend", "from_points",
    "intersects_interval", "max_void_radius", "model_label", "nearest",
    "realize", "thin", "write_csv",
    # interpolators
    "Line", "LevelRecord", "PiecewiseLinearFunction", "StepFunction",
    "TraceResult", "continuous_interpolate", "greedy_trace",
    "min_total_variation", "monotone_interpolate", "trace_signs",
    "weighted_variation_diagnostic",
    # percolation
    "BracketNotFoundError", "BracketRecord", "LambdaCResult", "McEstimate",
    "SiteLattice", "build_lattice", "crossing_probability",
    "directed_crossing", "estimate_lambda_c", "lipschitz_feasible",
    "periodic_feasible", "scaling_report", "strip_lines",
    # criteria
    "ArcFamily", "DivergentSubsetResult", "ProbeFailedError", "ScanResult",
    "SeriesDiagnostic", "circle_uncovered", "dyadic_block_reversal",
    "extract_divergent_subset", "rotating_cover_scan", "series_partial_sums",
    "uncovered_measure",
    # brownian
    "ANCHOR_ID", "DyadicPath", "brownian_path", "displacement_variance",
    "line_stream", "mean_spacing", "midpoint_displacements",
    "signed_displacement",
    # selftest
    "run_selftest",
]
