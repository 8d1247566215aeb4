"""Scalar information-theoretic helpers shared by the Gaussian and binary models.

All logarithms are base 2, so entropies and rates are in bits. The functions
accept Python floats or numpy arrays and return the same kind.
"""
import math

import numpy as np

_BISECTION_STEPS = 100


def _as_output(x, like):
    if np.ndim(like) == 0:
        return float(x)
    return x


def binary_entropy(x):
    """Binary entropy h(x) in bits, using the convention 0 log 0 = 0."""
    x_arr = np.asarray(x, dtype=float)
    if np.any((x_arr < 0) | (x_arr > 1)):
        raise ValueError("binary_entropy: argument must lie in [0, 1]")
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -x_arr * np.log2(x_arr) - (1.0 - x_arr) * np.log2(1.0 - x_arr)
    h = np.where((x_arr == 0) | (x_arr == 1), 0.0, h)
    return _as_output(h, x)


def inv_binary_entropy(y):
    """Inverse of the binary entropy restricted to [0, 1/2].

    Bisection on the bracket [0, 1/2], where h is increasing. A fixed number
    of halvings takes the bracket far below double resolution, so the result
    satisfies ``|h(inv_binary_entropy(y)) - y| <= 1e-10`` everywhere.

    Raises
    ------
    ValueError
        If any ``y`` lies outside [0, 1].
    """
    y_arr = np.asarray(y, dtype=float)
    if np.any(~np.isfinite(y_arr)) or np.any((y_arr < 0) | (y_arr > 1)):
        raise ValueError("inv_binary_entropy: argument must lie in [0, 1]")
    lo = np.zeros_like(y_arr)
    hi = np.full_like(y_arr, 0.5)
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        below = binary_entropy(mid) < y_arr
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    x = 0.5 * (lo + hi)
    # pin the endpoints exactly
    x = np.where(y_arr == 0, 0.0, np.where(y_arr == 1, 0.5, x))
    return _as_output(x, y)


def star(x, y):
    """Crossover probability of two cascaded BSCs: x(1-y) + (1-x)y."""
    return x * (1 - y) + (1 - x) * y


def log2_plus(x):
    """max(0, log2 x) for x > 0."""
    if np.any(np.asarray(x) <= 0):
        raise ValueError("log2_plus: argument must be positive")
    if np.ndim(x) == 0:
        return max(0.0, math.log2(x))
    return np.maximum(0.0, np.log2(x))
