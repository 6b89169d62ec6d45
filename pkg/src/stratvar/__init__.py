"""Exact variances, bounds and minimax allocation for stratified estimation of a red-ball fraction."""

from .errors import (
    EmptyClass,
    ExhaustedStratum,
    HypothesisViolated,
    NotProportionable,
    NotProportional,
    SearchSpaceExceeded,
    StratError,
    UnknownTheoremId,
    ValidationError,
    ZeroStratum,
)
from .model import (
    Allocation,
    AllocationClass,
    Mode,
    RedDistribution,
    Scenario,
    StratifiedPopulation,
    build_scenario,
    enumerate_allocations,
    enumerate_distributions,
    proportional_allocation,
)
from .oracle import (
    MinimaxResult,
    SearchResult,
    best_allocation,
    exhaustive_variance_Y,
    minimax_value,
    worst_nature,
)
from .simulate import SimConfig, SimResult, draw_with_replacement, draw_without_replacement, estimate
from .theorems import ParameterRanges, TheoremReport, check_theorem
from .variance import (
    Kind,
    VarianceReport,
    bound_b,
    minimax_upper_bound,
    nature_relaxed_max,
    proportional_decomposition,
    var_simple_with,
    var_simple_without,
    var_strat_with,
    var_strat_without,
    variance,
)

__version__ = "0.1.0"
