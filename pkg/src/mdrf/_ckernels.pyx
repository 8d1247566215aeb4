# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Semantics mirror :mod:`mdrf._pykernels` exactly."""
import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, log2, pow

cnp.import_array()


def gaussian_mdrf_batch(const double[::1] gammas, const double[:, ::1] rates):
    cdef Py_ssize_t n = rates.shape[0], L = rates.shape[1], i, l
    cdef double acc, d, g
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    for i in range(n):
        acc = 1.0
        for l in range(L):
            g = gammas[l]
            d = pow(2.0, -2.0 * rates[i, l])
            acc += g * (1.0 - d) / (1.0 + g * d)
        o[i] = 1.0 / acc
    return out


cdef void _half_table(const double[::1] c, const double[::1] q,
                      Py_ssize_t start, Py_ssize_t stop,
                      double[::1] s, double[::1] m) noexcept nogil:
    cdef Py_ssize_t k, j, size = 1
    s[0] = 0.0
    m[0] = 1.0
    for k in range(start, stop):
        for j in range(size):
            s[j + size] = s[j] + c[k]
            s[j] = s[j] - c[k]
            m[j + size] = m[j] * q[k]
            m[j] = m[j] * (1.0 - q[k])
        size *= 2


cdef void _masses_row(const double[::1] q, double t, double tol,
                      double[::1] c, double[::1] s_lo, double[::1] m_lo,
                      double[::1] s_hi, double[::1] m_hi,
                      double* out) noexcept nogil:
    cdef Py_ssize_t L = q.shape[0], l, i, j, n_lo, n_hi, L_lo
    cdef double s, w, gt_t = 0.0, eq_t = 0.0, gt_nt = 0.0, eq_nt = 0.0
    out[0] = 0.0
    out[1] = 0.0
    out[2] = 0.0
    out[3] = 0.0
    for l in range(L):
        if q[l] <= 0.0:
            # noiseless vote: the fused decision is always correct
            return
        c[l] = log2((1.0 - q[l]) / q[l])
    L_lo = L // 2
    n_lo = (<Py_ssize_t>1) << L_lo
    n_hi = (<Py_ssize_t>1) << (L - L_lo)
    _half_table(c, q, 0, L_lo, s_lo, m_lo)
    _half_table(c, q, L_lo, L, s_hi, m_hi)
    for j in range(n_hi):
        for i in range(n_lo):
            s = s_hi[j] + s_lo[i]
            w = m_hi[j] * m_lo[i]
            if fabs(s - t) <= tol:
                eq_t += w
            elif s > t:
                gt_t += w
            if fabs(s + t) <= tol:
                eq_nt += w
            elif s > -t:
                gt_nt += w
    out[0] = gt_t
    out[1] = eq_t
    out[2] = gt_nt
    out[3] = eq_nt


def llr_masses_batch(const double[:, ::1] q, double t, double tol):
    cdef Py_ssize_t n = q.shape[0], L = q.shape[1], i
    cdef Py_ssize_t L_lo = L // 2
    out = np.zeros((n, 4), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double[::1] c = np.empty(max(L, 1), dtype=np.float64)
    cdef double[::1] s_lo = np.empty((<Py_ssize_t>1) << L_lo, dtype=np.float64)
    cdef double[::1] m_lo = np.empty((<Py_ssize_t>1) << L_lo, dtype=np.float64)
    cdef double[::1] s_hi = np.empty((<Py_ssize_t>1) << (L - L_lo), dtype=np.float64)
    cdef double[::1] m_hi = np.empty((<Py_ssize_t>1) << (L - L_lo), dtype=np.float64)
    with nogil:
        for i in range(n):
            _masses_row(q[i], t, tol, c, s_lo, m_lo, s_hi, m_hi, &o[i, 0])
    return out
