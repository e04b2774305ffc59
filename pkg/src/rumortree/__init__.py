"""Maki-Thompson rumors on Galton-Watson trees."""

from .errors import BoundsNotApplicable, ConvergenceError, LawError, NumericalError, RumorTreeError
from .laws import Binomial, Custom, Fixed, Geometric, OffspringLaw, Poisson, parse_law
from .spreader import SpreaderLaw, build, conditional_pmf, mean_with_bounds
from .survival import critical_parameter, extinction_probability, survival
from .rumor_range import exact_tail, expected_range_bounds, tail_bounds
from .simulate import ReplicaOutcome, SimConfig, estimate, simulate_ctmc, simulate_generation

__version__ = "0.1.0"

__all__ = [
    "RumorTreeError", "LawError", "NumericalError", "ConvergenceError", "BoundsNotApplicable",
    "OffspringLaw", "Fixed", "Binomial", "Poisson", "Geometric", "Custom", "parse_law",
    "SpreaderLaw", "build", "conditional_pmf", "mean_with_bounds",
    "extinction_probability", "survival", "critical_parameter",
    "exact_tail", "tail_bounds", "expected_range_bounds",
    "SimConfig", "ReplicaOutcome", "simulate_generation", "simulate_ctmc", "estimate",
]
