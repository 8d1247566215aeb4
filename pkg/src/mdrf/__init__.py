"""Mismatched multiterminal distortion-rate functions and sum-rate allocation.

Gaussian sensors (AWGN observations, quadratic distortion) and binary sensors
(BSC observations, Hamming distortion), with brute-force and Monte Carlo
oracles for checking the closed forms.
"""
from .binary import (
    LlrSpec,
    allocate_binary,
    allocate_binary_asym,
    binary_ceo_bound,
    binary_mdrf,
    binary_mdrf_asym,
    llr_spec,
    mismatch_sum_rate,
    test_channel_distortion,
)
from .gaussian import (
    allocate_gaussian,
    g_water,
    gaussian_ceo_sum_rate,
    gaussian_mdrf,
    rate_from_level,
    single_active_boundary,
    solve_water_level,
    total_rate,
)
from .infomath import binary_entropy, inv_binary_entropy, log2_plus, star
from .kernels import BACKEND
from .models import (
    BinaryModel,
    CapacityError,
    GaussianModel,
    InfeasibleError,
    RateAllocation,
    WaterLevelSolution,
)
from .oracles import GridReport, SimReport, grid_search_allocation, simulate_binary, simulate_gaussian

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BinaryModel", "CapacityError", "GaussianModel", "GridReport", "InfeasibleError",
    "LlrSpec", "RateAllocation", "SimReport", "WaterLevelSolution", "allocate_binary",
    "allocate_binary_asym", "allocate_gaussian", "binary_ceo_bound", "binary_entropy",
    "binary_mdrf", "binary_mdrf_asym", "g_water", "gaussian_ceo_sum_rate", "gaussian_mdrf",
    "grid_search_allocation", "inv_binary_entropy", "llr_spec", "log2_plus", "mismatch_sum_rate",
    "rate_from_level", "simulate_binary", "simulate_gaussian", "single_active_boundary",
    "solve_water_level", "star", "test_channel_distortion", "total_rate",
]
