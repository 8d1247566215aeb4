"""Backend selection for the inner loops.

The compiled extension is used when it was built and importable; otherwise
(or when ``MDRF_PURE_PYTHON`` is set to a non-empty value) the numpy versions
are used. Both expose:

``gaussian_mdrf_batch(gammas, rates)``
    Gaussian mDRF for every row of an ``(N, L)`` rate matrix.
``llr_masses_batch(q, t, tol)``
    For each row of an ``(N, L)`` matrix of flip probabilities, the masses
    ``P(S > t)``, ``P(S = t)``, ``P(S > -t)``, ``P(S = -t)`` of the weighted
    vote ``S = sum_l c_l (2 U_l - 1)``, with ``U_l ~ Bern(q_l)`` and
    ``c_l = log2((1 - q_l) / q_l)``. Ties are decided within ``tol``. A row with
    a zero flip probability returns all zeros (a noiseless vote never errs).
"""
import os

import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

if _ckernels is not None and not os.environ.get("MDRF_PURE_PYTHON"):
    BACKEND = "cython"
    _impl = _ckernels
else:
    BACKEND = "python"
    _impl = _pykernels


def get_backend(name=None):
    """Return the kernel module for ``name`` ('cython', 'python' or None for active)."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython":
        if _ckernels is None:
            raise ImportError("compiled kernels are not available")
        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")


def gaussian_mdrf_batch(gammas, rates):
    gammas = np.ascontiguousarray(gammas, dtype=np.float64)
    rates = np.ascontiguousarray(np.atleast_2d(rates), dtype=np.float64)
    return _impl.gaussian_mdrf_batch(gammas, rates)


def llr_masses_batch(q, t, tol=1e-12):
    q = np.ascontiguousarray(np.atleast_2d(q), dtype=np.float64)
    return np.asarray(_impl.llr_masses_batch(q, float(t), float(tol)))
