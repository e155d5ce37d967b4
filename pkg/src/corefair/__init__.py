"""Solvers and verifiers for approximately core-fair public goods allocation.

The package computes integral outcomes approximating the core under matroid,
matching, and packing constraints, fractional core and fair-share benchmarks
with checkable certificates, and certifies or refutes (delta, alpha)-core
membership by exhaustive search at desk scale.
"""

from .endowment import dependent_round, endowment_additive_bound, endowment_core_check
from .errors import (
    ConvergenceError,
    CoreFairError,
    InfeasibleError,
    SizeCapError,
    UnboundedError,
    UnsupportedConstraintError,
    ValidationError,
)
from .fractional import MnwCertificate, MpfResult, fractional_mnw, mpf
from .generators import generate, generator_names
from .instance import (
    GraphicMatroid,
    Instance,
    Matching,
    Packing,
    PartitionMatroid,
    PrivateGoods,
    UniformMatroid,
    agent_optima,
    is_basis,
    is_feasible,
    max_agent_utility,
    normalize_utilities,
    outcome_utilities,
    utility,
    width,
)
from .linprog import LinearProgram, LpSolution, solve_lp
from .matching import (
    build_opt_multiset,
    enumerate_augmentations,
    local_search_matching,
)
from .matroid import (
    MatroidOracle,
    exchange_bijection,
    initial_basis,
    local_search_matroid,
    matroid_oracle,
)
from .objective import nash_welfare_key, smooth_nash, swap_gain
from .reports import SolverReport
from .rounding import (
    GroupingDiagnostics,
    RoundingConfig,
    chernoff_mixture_bound,
    grouping,
    round_outcome,
    solve_packing,
    violation_sets,
)
from .serialize import (
    instance_from_dict,
    instance_from_json,
    instance_to_dict,
    instance_to_json,
    load_instance,
)
from .verifier import (
    CoreCertificate,
    alpha_achieved,
    exact_smooth_mnw,
    feasible_outcomes,
    find_blocking_coalition,
    is_pareto_optimal,
    is_proportional,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "CoreCertificate",
    "CoreFairError",
    "GraphicMatroid",
    "GroupingDiagnostics",
    "InfeasibleError",
    "Instance",
    "LinearProgram",
    "LpSolution",
    "Matching",
    "MatroidOracle",
    "MnwCertificate",
    "MpfResult",
    "Packing",
    "PartitionMatroid",
    "PrivateGoods",
    "RoundingConfig",
    "SizeCapError",
    "SolverReport",
    "UnboundedError",
    "UniformMatroid",
    "UnsupportedConstraintError",
    "ValidationError",
    "agent_optima",
    "alpha_achieved",
    "build_opt_multiset",
    "chernoff_mixture_bound",
    "dependent_round",
    "endowment_additive_bound",
    "endowment_core_check",
    "enumerate_augmentations",
    "exact_smooth_mnw",
    "exchange_bijection",
    "feasible_outcomes",
    "find_blocking_coalition",
    "fractional_mnw",
    "generate",
    "generator_names",
    "grouping",
    "initial_basis",
    "instance_from_dict",
    "instance_from_json",
    "instance_to_dict",
    "instance_to_json",
    "is_basis",
    "is_feasible",
    "is_pareto_optimal",
    "is_proportional",
    "load_instance",
    "local_search_matching",
    "local_search_matroid",
    "matroid_oracle",
    "max_agent_utility",
    "mpf",
    "nash_welfare_key",
    "normalize_utilities",
    "outcome_utilities",
    "round_outcome",
    "smooth_nash",
    "solve_lp",
    "solve_packing",
    "swap_gain",
    "utility",
    "violation_sets",
    "width",
]
