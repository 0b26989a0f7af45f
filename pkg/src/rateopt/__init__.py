"""Closed-form weighted sum-rate and common-rate optimization over simplex-bounded SNR regions."""

from .framework import (
    CostVector,
    FeasibleRegion,
    FrameworkSolution,
    SimplexBound,
    WeightVector,
    certify_region_bound,
    omega_contains,
    solve_max_min,
    solve_weighted_product,
    theta_point,
    weighted_geometric_objective,
)
from .relay import (
    PRELOG,
    ChannelState,
    EffectiveGains,
    PowerAllocation,
    SnrPair,
    Unachievable,
    WeightTooSkewed,
    common_rate,
    common_rate_powers,
    effective_gains,
    recover_powers,
    relay_feasible_region,
    snr_pair,
    snr_sum_budget,
    weighted_optimal_snrs,
    weighted_sum_rate,
)

__version__ = "0.1.0"
