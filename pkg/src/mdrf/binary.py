"""Binary source observed through BSCs under Hamming distortion.

The lossy description from sensor ``l`` behaves like the source passed through
BSC(p_l) followed by the test channel BSC(D_l), so the decoder sees votes
flipped with probability ``q_l = p_l * D_l`` (the star product) and fuses them
with a weighted likelihood-ratio test. Distortions are obtained by exact
enumeration of the ``2**L`` vote patterns.
"""
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import kernels
from .infomath import binary_entropy, inv_binary_entropy, star
from .models import CapacityError, RateAllocation

MAX_ENUMERATION_SENSORS = 24
TIE_TOL = 1e-12

ENTROPY_MODES = ("symmetric", "bias_corrected")
TIE_RULES = ("half", "strict")


@dataclass(frozen=True)
class LlrSpec:
    q: Tuple[float, ...]
    c: Tuple[float, ...]
    threshold: float


def test_channel_distortion(rate, source_entropy=1.0):
    """Hamming distortion of a rate-``rate`` code for a binary source of entropy ``source_entropy``."""
    rate = np.asarray(rate, dtype=float)
    out = inv_binary_entropy(np.maximum(0.0, source_entropy - rate))
    return float(out) if np.ndim(out) == 0 else out


# keep pytest from collecting the function above as a test
test_channel_distortion.__test__ = False


def local_entropies(model, entropy_mode="bias_corrected"):
    """Entropy of each sensor's observation under ``entropy_mode``.

    ``symmetric`` treats every observation as uniform (entropy one bit);
    ``bias_corrected`` uses ``h(alpha * p_l)``. Both agree when ``alpha = 1/2``.
    """
    if entropy_mode not in ENTROPY_MODES:
        raise ValueError(f"entropy_mode must be one of {ENTROPY_MODES}")
    if entropy_mode == "symmetric":
        return np.ones(model.L)
    return np.array([binary_entropy(star(model.alpha, p)) for p in model.ps])


def _check_rates(model, rates):
    rates = np.asarray(rates, dtype=float)
    if rates.shape != (model.L,):
        raise ValueError(f"expected {model.L} rates, got shape {rates.shape}")
    if np.any(rates < 0) or np.any(np.isnan(rates)):
        raise ValueError("rates must be nonnegative")
    return rates


def flip_probabilities(model, rates, entropy_mode="bias_corrected"):
    """Per-sensor vote flip probabilities; ``rates`` may be ``(L,)`` or ``(N, L)``."""
    rates = np.asarray(rates, dtype=float)
    ent = local_entropies(model, entropy_mode)
    dist = inv_binary_entropy(np.maximum(0.0, ent - rates))
    return star(np.asarray(model.ps), dist)


def llr_spec(model, rates, entropy_mode="bias_corrected"):
    rates = _check_rates(model, rates)
    q = flip_probabilities(model, rates, entropy_mode)
    with np.errstate(divide="ignore"):
        c = np.where(q > 0, np.log2((1.0 - q) / np.where(q > 0, q, 1.0)), math.inf)
    t = math.log2((1.0 - model.alpha) / model.alpha)
    return LlrSpec(q=tuple(float(x) for x in q), c=tuple(float(x) for x in c), threshold=t)


def _check_capacity(L):
    if L > MAX_ENUMERATION_SENSORS:
        raise CapacityError(
            f"exact enumeration supports at most {MAX_ENUMERATION_SENSORS} sensors "
            f"(got {L}); use mdrf.oracles.simulate_binary instead")


def bayes_error(q, alpha, tie_rule="half"):
    """Error of the threshold test for each row of flip probabilities ``q``.

    ``tie_rule="half"`` splits outcomes lying on the threshold evenly between
    the two decisions. ``"strict"`` is only meaningful for a uniform source and
    returns ``P(S > 0)``, the probability that the vote favours the wrong bit
    outright, which drops ties entirely.
    """
    if tie_rule not in TIE_RULES:
        raise ValueError(f"tie_rule must be one of {TIE_RULES}")
    q = np.atleast_2d(np.asarray(q, dtype=float))
    _check_capacity(q.shape[1])
    t = math.log2((1.0 - alpha) / alpha)
    m = kernels.llr_masses_batch(q, t, TIE_TOL)
    if tie_rule == "strict":
        return m[:, 0]
    return (1.0 - alpha) * (m[:, 0] + 0.5 * m[:, 1]) + alpha * (m[:, 2] + 0.5 * m[:, 3])


def binary_mdrf(model, rates, tie_rule="half"):
    """Distortion at the decoder for a uniform source."""
    if model.alpha != 0.5:
        raise ValueError("binary_mdrf needs a uniform source; use binary_mdrf_asym")
    rates = _check_rates(model, rates)
    _check_capacity(model.L)
    q = flip_probabilities(model, rates, "symmetric")
    return float(bayes_error(q, 0.5, tie_rule)[0])


def binary_mdrf_asym(model, rates, entropy_mode="bias_corrected"):
    """MAP error probability for a Bernoulli(alpha) source.

    Decides 1 when the weighted vote exceeds ``log2((1 - alpha)/alpha)``.
    """
    rates = _check_rates(model, rates)
    _check_capacity(model.L)
    q = flip_probabilities(model, rates, entropy_mode)
    return float(bayes_error(q, model.alpha)[0])


def greedy_rates(L, budget):
    return tuple(float(min(1.0, max(0.0, budget - l))) for l in range(L))


def allocate_binary(model, budget):
    """Fill the least noisy sensors to one bit each, in order of noise level."""
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    if model.alpha != 0.5:
        raise ValueError("the greedy allocation is optimal only for a uniform source")
    rates = greedy_rates(model.L, budget)
    return RateAllocation(rates=rates, budget=budget, distortion=binary_mdrf(model, rates))


def allocate_binary_asym(model, budget, step=0.01, entropy_mode="bias_corrected"):
    """Grid search over the first sensor's share for a two-sensor, biased source.

    Candidates are ``R1 = 0, step, 2*step, ...`` up to ``min(budget, 1)`` with
    ``R2 = min(budget - R1, 1)``. On (near) ties the larger ``R1`` wins.
    """
    if model.L != 2:
        raise ValueError("allocate_binary_asym supports exactly two sensors")
    if not 0 < step <= 0.01:
        raise ValueError("step must lie in (0, 0.01]")
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    r1_max = min(budget, 1.0)
    n = int(math.floor(r1_max / step + 1e-9))
    r1 = np.arange(n + 1) * step
    if r1_max - r1[-1] > 1e-12:
        r1 = np.append(r1, r1_max)
    r1[-1] = min(r1[-1], r1_max)
    r2 = np.minimum(budget - r1, 1.0)
    q = flip_probabilities(model, np.column_stack([r1, r2]), entropy_mode)
    err = bayes_error(q, model.alpha)
    best = 0
    for k in range(1, len(err)):
        if err[k] <= err[best] + TIE_TOL:
            best = k
    rates = (float(r1[best]), float(r2[best]))
    return RateAllocation(rates=rates, budget=budget, distortion=float(err[best]),
                          method="grid_search")


def mismatch_sum_rate(model, distortion, tol=1e-10):
    """Smallest budget whose greedy allocation reaches ``distortion`` (inf if none)."""
    if model.alpha != 0.5:
        raise ValueError("needs a uniform source")
    L = model.L

    def reaches(budget):
        return binary_mdrf(model, greedy_rates(L, budget)) <= distortion + TIE_TOL

    if not reaches(L):
        return math.inf
    if reaches(0.0):
        return 0.0
    lo, hi = 0.0, float(L)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if reaches(mid):
            hi = mid
        else:
            lo = mid
    return hi


def binary_ceo_bound(p1, p2, d1, d2, rates=None):
    """Right-hand sides of the two-sensor binary CEO rate-region outer bound.

    Returns ``(bound_R1, bound_R2, bound_sum)``, each clamped at zero. The
    individual bounds depend on the other sensor's rate; ``rates=(R1, R2)``
    supplies them, and the default of one bit each gives the weakest,
    rate-independent form ``h(p1 * p2) - h(D_l)``.
    """
    for v in (p1, p2, d1, d2):
        if not 0.0 <= v <= 0.5:
            raise ValueError("probabilities must lie in [0, 1/2]")
    r1, r2 = (1.0, 1.0) if rates is None else (min(1.0, rates[0]), min(1.0, rates[1]))
    rho = star(p1, p2)
    b1 = binary_entropy(star(rho, inv_binary_entropy(1.0 - r2))) - binary_entropy(d1)
    b2 = binary_entropy(star(rho, inv_binary_entropy(1.0 - r1))) - binary_entropy(d2)
    bsum = 1.0 + binary_entropy(rho) - binary_entropy(d1) - binary_entropy(d2)
    return max(0.0, b1), max(0.0, b2), max(0.0, bsum)
