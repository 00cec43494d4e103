"""Warm-started adaptive QAOA for weighted MaxCut on dense statevectors."""

from .ansatz import VARIANTS, RunConfig, RunRecord, build_pool, run_algorithm, select_mixer
from .graphs import Graph, brute_force_maxcut, random_regular, total_weight
from .warmstart import BMConfig, best_warm_state, solve_bm_rank3, warm_start

__all__ = [
    "VARIANTS", "RunConfig", "RunRecord", "build_pool", "run_algorithm", "select_mixer",
    "Graph", "brute_force_maxcut", "random_regular", "total_weight",
    "BMConfig", "best_warm_state", "solve_bm_rank3", "warm_start",
]
