"""Closed-loop latency distributions for edge-assisted teleoperation.

Transmission, compression, decompression and computation delays are
modelled as independent random components, discretized on a common grid and
convolved into the loop-latency PMF.  Quantile bounds prune the search for
the compression ratio that minimises a latency percentile, and a Monte Carlo
sampler serves as ground truth.
"""

__version__ = "0.1.0"

from .bounds import BoundsResult, bound_gap_surface, quantile_bounds
from .dist import ComponentDist, DiscretePmf, convolve, discretize, pmf_quantile
from .loop import Case, ClosedLoopModel, ScenarioParams, build_model, closed_loop_pmf
from .optimize import OptimizationResult, solve_p1, solve_p2_average, sweep_epsilon
from .oracle import McConfig, compare_cdf, sample_closed_loop
from .scenario import REFERENCE_SCENARIO, ScenarioFile, load_scenario

__all__ = [
    "BoundsResult", "bound_gap_surface", "quantile_bounds",
    "ComponentDist", "DiscretePmf", "convolve", "discretize", "pmf_quantile",
    "Case", "ClosedLoopModel", "ScenarioParams", "build_model", "closed_loop_pmf",
    "OptimizationResult", "solve_p1", "solve_p2_average", "sweep_epsilon",
    "McConfig", "compare_cdf", "sample_closed_loop",
    "REFERENCE_SCENARIO", "ScenarioFile", "load_scenario",
]
