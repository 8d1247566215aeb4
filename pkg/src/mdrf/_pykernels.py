"""Pure numpy implementations of the inner loops in ``_ckernels.pyx``.

Both backends build the likelihood-ratio tables in the same bit order, so the
per-outcome sums match to the last ulp and only the final mass reduction may
differ in rounding.
"""
import numpy as np

# outcomes processed per block when combining the two half tables
_BLOCK = 1 << 20


def gaussian_mdrf_batch(gammas, rates):
    gammas = np.asarray(gammas, dtype=float)
    rates = np.asarray(rates, dtype=float)
    d = np.power(2.0, -2.0 * rates)
    return 1.0 / (1.0 + np.sum(gammas * (1.0 - d) / (1.0 + gammas * d), axis=1))


def _half_table(c, q):
    s = np.zeros(1)
    m = np.ones(1)
    for ck, qk in zip(c, q):
        s = np.concatenate((s - ck, s + ck))
        m = np.concatenate((m * (1.0 - qk), m * qk))
    return s, m


def _masses_row(q, t, tol):
    if np.any(q <= 0.0):
        return np.zeros(4)
    c = np.log2((1.0 - q) / q)
    half = len(q) // 2
    s_lo, m_lo = _half_table(c[:half], q[:half])
    s_hi, m_hi = _half_table(c[half:], q[half:])
    out = np.zeros(4)
    rows = max(1, _BLOCK // len(s_lo))
    for j in range(0, len(s_hi), rows):
        s = s_hi[j:j + rows, None] + s_lo[None, :]
        w = m_hi[j:j + rows, None] * m_lo[None, :]
        eq_t = np.abs(s - t) <= tol
        eq_nt = np.abs(s + t) <= tol
        out[0] += w[(s > t) & ~eq_t].sum()
        out[1] += w[eq_t].sum()
        out[2] += w[(s > -t) & ~eq_nt].sum()
        out[3] += w[eq_nt].sum()
    return out


def llr_masses_batch(q, t, tol):
    q = np.atleast_2d(np.asarray(q, dtype=float))
    return np.array([_masses_row(row, t, tol) for row in q]).reshape(len(q), 4)
