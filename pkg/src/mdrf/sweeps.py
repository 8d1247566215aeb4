"""Figure-data sweeps. Each returns ``(header, rows)`` with one row per grid point."""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .binary import allocate_binary, allocate_binary_asym, binary_ceo_bound, mismatch_sum_rate
from .gaussian import activation_threshold, allocate_gaussian, single_active_boundary
from .models import BinaryModel, GaussianModel

SWEEP_KINDS = ("threshold", "alloc_vs_budget", "single_active", "ceo_binary", "bernoulli_asym")


def _map(fn, values, workers):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, values))
    return [fn(v) for v in values]


def threshold_sweep(gammas, workers=1):
    def row(g):
        return (g, activation_threshold(g), "inverse" if g <= 1 else "linear")

    return ("gamma", "nu_boundary", "regime"), _map(row, gammas, workers)


def alloc_vs_budget_sweep(model, budgets, workers=1, **options):
    def row(r):
        if isinstance(model, GaussianModel):
            alloc = allocate_gaussian(model, r, **options)
        else:
            alloc = allocate_binary(model, r)
        return (r, *alloc.rates)

    header = ("R",) + tuple(f"R{l + 1}" for l in range(model.L))
    return header, _map(row, budgets, workers)


def single_active_sweep(gamma1, gamma2s, tol=1e-9, workers=1):
    def row(g2):
        return (g2, single_active_boundary(gamma1, g2, tol))

    return ("gamma2", "R_boundary"), _map(row, gamma2s, workers)


def ceo_binary_sweep(model, distortions, workers=1):
    """Mismatched sum rate vs. the two-sensor CEO sum-rate bound at each distortion."""
    p1, p2 = model.ps[0], model.ps[1] if model.L > 1 else model.ps[0]

    def row(d):
        return (d, mismatch_sum_rate(model, d), binary_ceo_bound(p1, p2, d, d)[2])

    return ("D", "R_mismatch", "R_ceo_bound"), _map(row, distortions, workers)


def bernoulli_asym_sweep(ps, budget, alphas, step=0.01, entropy_mode="bias_corrected", workers=1):
    def row(a):
        alloc = allocate_binary_asym(BinaryModel(ps, a), budget, step, entropy_mode)
        return (a, alloc.rates[0], alloc.distortion)

    return ("alpha", "R1_opt", "distortion"), _map(row, alphas, workers)


def grid_values(start, stop, num):
    return [float(v) for v in np.linspace(start, stop, num)]
