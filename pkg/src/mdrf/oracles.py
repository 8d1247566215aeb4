"""Brute-force and Monte Carlo ground truth for the closed-form results.

Nothing here calls the allocators: the grid search only evaluates distortions
and the simulators never touch the distortion formulas.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import kernels
from .binary import bayes_error, flip_probabilities, llr_spec, local_entropies, test_channel_distortion
from .models import BinaryModel, CapacityError

MAX_GRID_SENSORS = 4
MIN_SAMPLES = 10_000
BLOCK_SIZE = 1 << 16


@dataclass(frozen=True)
class GridReport:
    best_rates: Tuple[float, ...]
    best_distortion: float
    step: float
    evaluations: int
    budget: float


@dataclass(frozen=True)
class SimReport:
    estimate: float
    stderr: float
    samples: int
    seed: int


def _free_coordinates(n_free, k_max, k_total):
    """Yield integer arrays of shape (M, n_free) with entries <= k_max and row sums <= k_total."""
    if n_free == 0:
        yield np.zeros((1, 0), dtype=np.int64)
        return
    if n_free == 1:
        yield np.arange(min(k_max, k_total) + 1)[:, None]
        return
    for k0 in range(min(k_max, k_total) + 1):
        rest = k_total - k0
        axes = np.meshgrid(*[np.arange(min(k_max, rest) + 1)] * (n_free - 1), indexing="ij")
        rows = np.stack([a.ravel() for a in axes], axis=1)
        rows = rows[rows.sum(axis=1) <= rest]
        yield np.column_stack([np.full(len(rows), k0), rows])


def grid_search_allocation(model, budget, step, entropy_mode="bias_corrected"):
    """Exhaustive search over rate vectors on a lattice of spacing ``step``.

    All but the last sensor take multiples of ``step``; the last takes what
    is left of the budget. Binary rates are capped at one bit, and the budget
    is truncated to ``L`` bits when it exceeds that. The first minimiser in
    lexicographic order is returned.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    L = model.L
    if L > MAX_GRID_SENSORS:
        raise CapacityError(f"grid search supports at most {MAX_GRID_SENSORS} sensors")
    binary = isinstance(model, BinaryModel)
    cap = 1.0 if binary else math.inf
    target = min(budget, L * cap)
    k_total = int(math.floor(target / step + 1e-9))
    k_max = k_total if not binary else int(math.floor(min(cap, target) / step + 1e-9))

    best_d, best_rates, evaluations = math.inf, None, 0
    for ks in _free_coordinates(L - 1, k_max, k_total):
        free = ks * step
        last = target - free.sum(axis=1)
        keep = (last >= -1e-12) & (last <= cap + 1e-12)
        rates = np.column_stack([free[keep], np.clip(last[keep], 0.0, cap)])
        if not len(rates):
            continue
        if binary:
            q = flip_probabilities(model, rates, entropy_mode)
            d = bayes_error(q, model.alpha)
        else:
            d = kernels.gaussian_mdrf_batch(np.asarray(model.gammas), rates)
        evaluations += len(d)
        k = int(np.argmin(d))
        if d[k] < best_d:
            best_d, best_rates = float(d[k]), tuple(float(r) for r in rates[k])
    return GridReport(best_rates=best_rates, best_distortion=best_d, step=step,
                      evaluations=evaluations, budget=budget)


def _block_sizes(samples):
    full, rem = divmod(samples, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rem] if rem else [])


def _block_rng(seed, index):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def _run_blocks(fn, samples, seed, workers):
    """Evaluate ``fn(rng, n)`` per block and reduce the (sum, sum of squares) in block order."""
    if samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    jobs = [(i, n) for i, n in enumerate(_block_sizes(samples))]

    def one(job):
        i, n = job
        loss = fn(_block_rng(seed, i), n)
        return float(loss.sum()), float(np.square(loss).sum())

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, jobs))
    else:
        parts = [one(job) for job in jobs]
    total = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    mean = total / samples
    var = max(0.0, (total_sq - samples * mean * mean) / (samples - 1))
    return SimReport(estimate=mean, stderr=math.sqrt(var / samples), samples=samples, seed=seed)


def simulate_gaussian(model, rates, samples=1_000_000, seed=0, workers=1):
    """Monte Carlo MSE of the LMMSE source estimate from simulated encoder outputs.

    Each encoder is replaced by the forward test channel ``Yhat = a (Y + W)``
    with ``a = 1 - 4**-R`` and ``Var W = s2 4**-R / (1 - 4**-R)``, where ``s2``
    is the variance of its observation. This gives ``I(Y; Yhat) = R`` and
    quadratic distortion ``s2 4**-R``. A zero-rate encoder outputs zero.
    """
    gammas = np.asarray(model.gammas)
    rates = np.asarray(rates, dtype=float)
    if rates.shape != gammas.shape or np.any(rates < 0):
        raise ValueError("rates must be nonnegative, one per sensor")
    s2 = gammas + 1.0
    d = np.power(2.0, -2.0 * rates)
    on = rates > 0
    a = np.where(on, 1.0 - d, 0.0)
    w_std = np.sqrt(np.where(on, s2 * d / np.where(on, 1.0 - d, 1.0), 0.0))
    root = np.sqrt(gammas)

    cov = np.outer(a * root, a * root)
    np.fill_diagonal(cov, np.where(on, s2 * (1.0 - d), 0.0))
    weights = np.zeros(model.L)
    if on.any():
        weights[on] = np.linalg.solve(cov[np.ix_(on, on)], (a * root)[on])

    def block(rng, n):
        x = rng.standard_normal(n)
        z = rng.standard_normal((n, model.L))
        w = rng.standard_normal((n, model.L))
        y_hat = a * (root * x[:, None] + z + w_std * w)
        return np.square(x - y_hat @ weights)

    return _run_blocks(block, samples, seed, workers)


def simulate_binary(model, rates, samples=1_000_000, seed=0, entropy_mode="bias_corrected",
                    workers=1):
    """Monte Carlo Hamming error of the fused vote.

    Each description is the source passed through BSC(p_l) then BSC(D_l),
    where ``D_l`` is the test-channel distortion at rate ``R_l``. For a biased
    source this is the cascade model, not the exact non-uniform test channel.
    Votes tied with the threshold are settled by a fair coin.
    """
    spec = llr_spec(model, rates, entropy_mode)
    ent = local_entropies(model, entropy_mode)
    dist = np.array([test_channel_distortion(r, h) for r, h in zip(rates, ent)])
    ps = np.asarray(model.ps)
    c = np.asarray(spec.c)
    t = spec.threshold
    alpha = model.alpha

    def block(rng, n):
        x = rng.random(n) < alpha
        z = rng.random((n, model.L)) < ps
        v = rng.random((n, model.L)) < dist
        coin = rng.random(n) < 0.5
        y_hat = x[:, None] ^ z ^ v
        s = np.sum(np.where(y_hat, c, -c), axis=1)
        tie = np.abs(s - t) <= 1e-12
        decide = np.where(tie, coin, s > t)
        return (decide != x).astype(float)

    return _run_blocks(block, samples, seed, workers)
