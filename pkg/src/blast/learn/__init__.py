"""Supervised-learning drivers: global searchers and local refinement."""

from .driver import TwoStageDriver, distinct_top, random_search, two_stage
from .evaluators import (
    CountingEvaluator,
    FitEvaluator,
    FunctionEvaluator,
    evaluate_fit_task,
    evaluate_vector,
    load_eval_spec,
    make_eval_spec,
)
from .ga import GaConfig, GaDriver, LearnResult, ga_step, run_ga, sample_uniform
from .nsga2 import crowding_distance, fast_nondominated_sort, nsga2
from .simplex import NmConfig, nelder_mead

__all__ = [
    "CountingEvaluator",
    "FitEvaluator",
    "FunctionEvaluator",
    "GaConfig",
    "GaDriver",
    "LearnResult",
    "NmConfig",
    "TwoStageDriver",
    "crowding_distance",
    "distinct_top",
    "evaluate_fit_task",
    "evaluate_vector",
    "fast_nondominated_sort",
    "ga_step",
    "load_eval_spec",
    "make_eval_spec",
    "nelder_mead",
    "nsga2",
    "random_search",
    "run_ga",
    "sample_uniform",
    "two_stage",
]
