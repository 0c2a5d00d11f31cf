"""Fair division of indivisible goods: EFX approximation and exact EFX solvers."""

from .core import (
    Additive,
    Allocation,
    EnvyGraph,
    Instance,
    Multiplicative,
    TableValuation,
    UnitDemand,
    Valuation,
    build_envy_graph,
    bundle_value,
    check_cancelable,
    envy_levels,
    exact,
    fmt,
)
from .ece import EcePolicy, decycle, run_ece
from .framework import PartialCertificate, measure_partial, run_framework
from .gen import generate
from .oracle import best_alpha_efx, enumerate_allocations, exists_efx
from .tiers import TierPartition, detect_tiers, solve_distinct_top_tiers, solve_tiered
from .topn import (
    common_top_set,
    solve_bounded_interval,
    solve_distinct_favorites,
    solve_relaxed_top_ranking,
    solve_top_n,
)
from .verify import (
    EF,
    EF1,
    EFX,
    FairnessProperty,
    FairnessReport,
    alpha_ef,
    alpha_efx,
    check_fairness,
    max_alpha_efx,
    strong_envy_pairs,
)

__all__ = [name for name in dir() if not name.startswith("_")]
