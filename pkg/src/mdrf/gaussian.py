"""Gaussian source in Gaussian noise under quadratic distortion.

Each sensor's encoder operates on the Gaussian distortion-rate curve of its own
observation; the decoder forms the MMSE estimate of the source. Allocation of
a sum-rate budget follows the water-level rule obtained from the KKT system,
with a numeric simplex search for budgets where no water level exists.
"""
import math

import numpy as np
from scipy.optimize import minimize_scalar

from . import kernels
from .infomath import log2_plus
from .models import InfeasibleError, RateAllocation, WaterLevelSolution

_LN2 = math.log(2.0)


def _check_rates(model, rates):
    rates = np.asarray(rates, dtype=float)
    if rates.shape != (model.L,):
        raise ValueError(f"expected {model.L} rates, got shape {rates.shape}")
    if np.any(rates < 0) or np.any(np.isnan(rates)):
        raise ValueError("rates must be nonnegative")
    return rates


def _gain(gammas, rates):
    # per-sensor term of the inverse distortion; increasing in rate
    d = np.power(2.0, -2.0 * np.asarray(rates, dtype=float))
    return gammas * (1.0 - d) / (1.0 + gammas * d)


def _gain_slope(gamma, rate):
    # d/dR of _gain
    x = 2.0 ** (2.0 * rate)
    return 2.0 * _LN2 * gamma * (gamma + 1.0) * x / (x + gamma) ** 2


def gaussian_mdrf(model, rates):
    """MMSE of the source given every sensor's lossy description."""
    rates = _check_rates(model, rates)
    return float(1.0 / (1.0 + np.sum(_gain(np.asarray(model.gammas), rates))))


def activation_threshold(gamma):
    """Largest water level at which a sensor with SNR ``gamma`` is still active."""
    if gamma <= 1:
        return 2.0 * gamma / (gamma + 1.0)
    return (gamma + 1.0) / 2.0


def activation_violations(model, nu, rates, tol=1e-9):
    """Count sensors whose activity disagrees with the threshold rule at level ``nu``.

    Levels within ``tol`` of a sensor's threshold are accepted either way.
    """
    bad = 0
    for g, r in zip(model.gammas, rates):
        thr = activation_threshold(g)
        if (r > 0 and nu > thr + tol) or (r == 0 and nu < thr - tol):
            bad += 1
    return bad


def g_water(nu, gamma):
    """The larger root ``4**R`` of the stationarity condition at level ``nu``."""
    if not 0 < nu <= (gamma + 1.0) / 2.0:
        raise ValueError(f"water level {nu} outside (0, (gamma+1)/2] for gamma={gamma}")
    radicand = max(0.0, (gamma + 1.0) * (gamma + 1.0 - 2.0 * nu))
    return gamma / nu * (gamma + 1.0 - nu + math.sqrt(radicand))


def rate_from_level(nu, gamma):
    if nu <= 0:
        raise ValueError("water level must be positive")
    if gamma <= 0 or nu > activation_threshold(gamma):
        return 0.0
    # g can dip a hair below 1 at the threshold of a gamma <= 1 sensor
    return max(0.0, 0.5 * math.log2(g_water(nu, gamma)))


def total_rate(model, nu):
    return sum(rate_from_level(nu, g) for g in model.gammas)


def _solution(model, nu, exact, diagnosis=None):
    rates = tuple(rate_from_level(nu, g) for g in model.gammas)
    return WaterLevelSolution(
        nu_star=nu,
        rates=rates,
        total_rate=sum(rates),
        active=tuple(r > 0 for r in rates),
        exact=exact,
        diagnosis=diagnosis,
    )


def solve_water_level(model, budget, tol=1e-9):
    """Find the water level whose active rates sum to ``budget``.

    The total rate is non-increasing in the level, so the level is bisected
    (geometrically, since it shrinks like 4**-R for large budgets) down to
    adjacent doubles. ``exact`` is False when the budget sits below the
    single-sensor floor ``(L0/2) log+ gamma_1`` or inside one of the downward
    jumps the total rate takes at ``(gamma_l + 1)/2`` for ``gamma_l > 1``.
    """
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    if tol <= 0:
        raise ValueError("tol must be positive")
    gammas = model.gammas
    top = (gammas[0] + 1.0) / 2.0
    if budget == 0:
        level = math.nextafter(max(activation_threshold(g) for g in gammas), math.inf)
        return _solution(model, level, True)
    if gammas[0] == 0:
        return _solution(model, top, False, "no_informative_sensor")

    n_top = sum(1 for g in gammas if g == gammas[0])
    floor = n_top / 2.0 * log2_plus(gammas[0])
    if budget < floor:
        return _solution(model, top, False, "infeasible_below_threshold")

    hi = top
    if total_rate(model, hi) >= budget:
        lo = hi
    else:
        lo = hi / 2.0
        while total_rate(model, lo) < budget:
            lo /= 2.0
            if lo < 1e-300:
                raise ValueError(f"budget {budget} exceeds double-precision range")
        for _ in range(400):
            mid = math.sqrt(lo * hi)
            if mid <= lo or mid >= hi:
                break
            if total_rate(model, mid) >= budget:
                lo = mid
            else:
                hi = mid

    sol = _solution(model, lo, True)
    if abs(sol.total_rate - budget) <= tol:
        return sol
    jump = any(g > 1 and lo <= (g + 1.0) / 2.0 <= hi for g in gammas)
    return _solution(model, lo, False, "discontinuity" if jump else "precision")


def _pair_search(gammas, i, j, total):
    """Best split of ``total`` between sensors i and j (max of summed gains)."""

    def neg(x):
        return -(_gain(gammas[i], x) + _gain(gammas[j], total - x))

    xs = np.linspace(0.0, total, 65)
    vals = -(_gain(gammas[i], xs) + _gain(gammas[j], total - xs))
    k = int(np.argmin(vals))
    best_x, best_v = xs[k], vals[k]
    lo, hi = xs[max(k - 1, 0)], xs[min(k + 1, len(xs) - 1)]
    if hi > lo:
        res = minimize_scalar(neg, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-13})
        if res.fun < best_v:
            best_x, best_v = float(res.x), float(res.fun)
    return best_x


def _simplex_descent(model, budget, starts, seed):
    gammas = np.asarray(model.gammas)
    L = model.L
    rng = np.random.default_rng(seed)
    inits = [np.full(L, budget / L)] + [rng.dirichlet(np.ones(L)) * budget for _ in range(starts)]
    best_rates, best_d = None, math.inf
    for rates in inits:
        d = 1.0 / (1.0 + _gain(gammas, rates).sum())
        while True:
            for i in range(L):
                for j in range(i + 1, L):
                    total = rates[i] + rates[j]
                    x = _pair_search(gammas, i, j, total)
                    trial = rates.copy()
                    trial[i], trial[j] = x, total - x
                    if _gain(gammas, trial).sum() > _gain(gammas, rates).sum():
                        rates = trial
            new_d = 1.0 / (1.0 + _gain(gammas, rates).sum())
            improved = d - new_d
            d = new_d
            if improved < 1e-12:
                break
        if d < best_d:
            best_rates, best_d = rates, d
    # keep the exact budget despite the pairwise updates' rounding
    best_rates = np.maximum(best_rates, 0.0)
    best_rates *= budget / best_rates.sum()
    return best_rates


def allocate_gaussian(model, budget, tol=1e-9, fallback=True, starts=20, seed=0):
    """Minimum-distortion split of ``budget`` bits among the sensors.

    Uses the water-level solution when it meets the budget exactly. Otherwise
    a pairwise coordinate descent over the simplex ``sum(R) = budget`` runs
    from the uniform split and ``starts`` random splits (seeded) and the best
    local optimum is kept.

    Raises
    ------
    InfeasibleError
        When the water level does not exist and ``fallback`` is False.
    """
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    if budget == 0:
        return RateAllocation(rates=(0.0,) * model.L, budget=0.0, distortion=1.0,
                              nu_star=solve_water_level(model, 0.0).nu_star)
    sol = solve_water_level(model, budget, tol)
    if sol.exact:
        return RateAllocation(rates=sol.rates, budget=budget,
                              distortion=gaussian_mdrf(model, sol.rates),
                              nu_star=sol.nu_star)
    if not fallback:
        raise InfeasibleError(
            f"no water level meets budget {budget} ({sol.diagnosis})", sol.diagnosis)
    if model.L == 1:
        rates = np.array([float(budget)])
    else:
        rates = _simplex_descent(model, budget, starts, seed)
    rates = tuple(float(r) for r in rates)
    return RateAllocation(rates=rates, budget=budget,
                          distortion=gaussian_mdrf(model, rates),
                          method="fallback_numeric", diagnosis=sol.diagnosis)


def _second_sensor_helps(gamma1, gamma2, budget):
    # True when some split with R2 > 0 beats giving everything to sensor 1
    if _gain_slope(gamma2, 0.0) > _gain_slope(gamma1, budget):
        return True

    def neg(x):
        return -(_gain(gamma1, budget - x) + _gain(gamma2, x))

    end = neg(0.0)
    xs = np.linspace(0.0, budget, 201)[1:]
    vals = neg(xs)
    k = int(np.argmin(vals))
    best = vals[k]
    lo, hi = xs[max(k - 1, 0)], xs[k + 1] if k + 1 < len(xs) else budget
    res = minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    best = min(best, float(res.fun))
    return best < end - 1e-15


def single_active_boundary(gamma1, gamma2, tol=1e-9):
    """Largest budget for which the two-sensor optimum leaves sensor 2 silent.

    Returns ``math.inf`` when ``gamma2 == 0``.
    """
    if gamma2 > gamma1:
        raise ValueError("expected gamma2 <= gamma1")
    if gamma2 < 0:
        raise ValueError("SNRs must be nonnegative")
    if gamma2 == 0:
        return math.inf
    lo, hi = 0.0, 1.0
    while not _second_sensor_helps(gamma1, gamma2, hi):
        lo, hi = hi, 2.0 * hi
        if hi > 1e3:
            return math.inf
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _second_sensor_helps(gamma1, gamma2, mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def gaussian_ceo_sum_rate(distortion, gamma, L):
    """Symmetric quadratic-Gaussian CEO sum rate at target distortion."""
    if distortion <= 0:
        raise ValueError("distortion must be positive")
    if gamma <= 0 or L < 1:
        raise ValueError("need gamma > 0 and L >= 1")
    arg = 1.0 + 1.0 / gamma**2 - 1.0 / (gamma**2 * distortion)
    # log+ vanishes for arguments below one, nonpositive ones included
    second = log2_plus(arg) if arg > 0 else 0.0
    return 0.5 * log2_plus(1.0 / distortion) - L / 2.0 * second


def batch_mdrf(model, rates):
    """Gaussian mDRF for each row of an ``(N, L)`` array of rates."""
    return kernels.gaussian_mdrf_batch(np.asarray(model.gammas), rates)
