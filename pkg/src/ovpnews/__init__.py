"""Optimize-via-predict newsvendor solver and benchmark harness."""

__version__ = "0.1.0"

from .benchmarks import PolicyKind, PolicySpec
from .distributions import RngStream
from .evaluation import Exponential, ExperimentConfig, GammaTruth, evaluate_policy, run_experiment
from .hypothesis import Prices, mle
from .localization import Dirac, Normal, Uniform, sample_localization
from .ovp import OvpConfig, search_objective, solve_ovp, solve_ovp_saa

__all__ = [
    "Dirac", "Exponential", "ExperimentConfig", "GammaTruth", "Normal", "OvpConfig", "PolicyKind",
    "PolicySpec", "Prices", "RngStream", "Uniform", "evaluate_policy", "mle", "run_experiment",
    "sample_localization", "search_objective", "solve_ovp", "solve_ovp_saa",
]
