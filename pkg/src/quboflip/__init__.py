"""quboflip: one-flip local optima toolkit for QUBO maximization.

Enumerates diverse sets of one-flip local optima with a propagation-based
search, profiles them, reweights the Q matrix with soft constraints, and
benchmarks the effect on a one-flip tabu search with path relinking.
"""

from .analysis import (
    FrequencyProfile,
    TransformConfig,
    frequency,
    improvement_pct,
    paired_t_test,
    t_critical_value,
    transform,
)
from .budget import Budget
from .enumeration import (
    EnumerationConfig,
    SearchState,
    VerificationError,
    diversity_report,
    enumerate_local_optima,
    export_big_m_model,
)
from .estimators import (
    GreedyRestartSampler,
    LocalOptimaEnumerator,
    SoftConstraintReweighter,
    TabuSearchOptimizer,
)
from .io import (
    GeneratorConfig,
    ParseError,
    generate_instance,
    parse_instances,
    parse_solutions,
    write_instance,
    write_solutions,
)
from .model import (
    GainState,
    LocalOptimaSet,
    QuboInstance,
    Solution,
    build_gain_state,
    is_one_flip_local_optimum,
    objective_value,
)
from .oracle import (
    CapExceededError,
    brute_force_global_optimum,
    brute_force_local_optima,
)
from .tabu import (
    EliteSet,
    TabuParams,
    TabuResult,
    greedy_descent,
    path_relink,
    run_variant,
    sample_greedy_restarts,
    tabu_search,
)

__version__ = "0.1.0"

__all__ = [
    "Budget",
    "CapExceededError",
    "EliteSet",
    "EnumerationConfig",
    "FrequencyProfile",
    "GainState",
    "GeneratorConfig",
    "GreedyRestartSampler",
    "LocalOptimaEnumerator",
    "LocalOptimaSet",
    "ParseError",
    "QuboInstance",
    "SearchState",
    "SoftConstraintReweighter",
    "Solution",
    "TabuParams",
    "TabuResult",
    "TabuSearchOptimizer",
    "TransformConfig",
    "VerificationError",
    "brute_force_global_optimum",
    "brute_force_local_optima",
    "build_gain_state",
    "diversity_report",
    "enumerate_local_optima",
    "export_big_m_model",
    "frequency",
    "generate_instance",
    "greedy_descent",
    "improvement_pct",
    "is_one_flip_local_optimum",
    "objective_value",
    "paired_t_test",
    "parse_instances",
    "parse_solutions",
    "path_relink",
    "run_variant",
    "sample_greedy_restarts",
    "t_critical_value",
    "tabu_search",
    "transform",
    "write_instance",
    "write_solutions",
]
