# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: initializedcheck=False, language_level=3
"""Compiled pairwise current-element force kernel.

Computes, for every target element p, the summand

    f_p += -[2 (dlp . dlq) - 3 (dlp . rhat)(dlq . rhat)] * rhat / r^2

summed over all source elements q, where r = x_p - x_q (source to target).
The physical prefactor (mu_r * 1e-7 and the two currents) is applied by the
caller.  Each target row is summed sequentially in a fixed order, so results
do not depend on the thread count; rows are parallelized with OpenMP.

Inputs are passed as separate contiguous x/y/z component arrays.  The kernel
also reports the smallest pairwise squared distance seen, letting the caller
reject overlapping geometry.
"""

import numpy as np

cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport sqrt

cnp.import_array()


cdef inline double _row(
    const double* qx, const double* qy, const double* qz,
    const double* qtx, const double* qty, const double* qtz,
    Py_ssize_t m,
    double px, double py, double pz,
    double ptx, double pty, double ptz,
    double* out,
) noexcept nogil:
    cdef Py_ssize_t j
    cdef double rx, ry, rz, r2, inv_r2, inv_r3, pq, pr, qr, b
    cdef double fx = 0.0, fy = 0.0, fz = 0.0
    cdef double min_r2 = 1e300
    for j in range(m):
        rx = px - qx[j]
        ry = py - qy[j]
        rz = pz - qz[j]
        r2 = rx * rx + ry * ry + rz * rz
        if r2 < min_r2:
            min_r2 = r2
        inv_r2 = 1.0 / r2
        inv_r3 = 1.0 / (r2 * sqrt(r2))
        pq = ptx * qtx[j] + pty * qty[j] + ptz * qtz[j]
        pr = ptx * rx + pty * ry + ptz * rz
        qr = qtx[j] * rx + qty[j] * ry + qtz[j] * rz
        b = (2.0 * pq - 3.0 * pr * qr * inv_r2) * inv_r3
        fx = fx - b * rx
        fy = fy - b * ry
        fz = fz - b * rz
    out[0] = fx
    out[1] = fy
    out[2] = fz
    return min_r2


def row_forces(
    cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] xp,
    cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] dp,
    cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] xq,
    cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] dq,
    int num_threads,
):
    """Per-target-row geometric force sums and the minimum pair distance^2.

    xp, dp: (n, 3) target element midpoints and tangent vectors.
    xq, dq: (m, 3) source element midpoints and tangent vectors.
    Returns (rows, min_r2) with rows of shape (n, 3).
    """
    cdef Py_ssize_t n = xp.shape[0]
    cdef Py_ssize_t m = xq.shape[0]
    if xp.shape[1] != 3 or dp.shape[1] != 3 or xq.shape[1] != 3 or dq.shape[1] != 3:
        raise ValueError("element arrays must have shape (N, 3)")
    if dp.shape[0] != n or dq.shape[0] != m:
        raise ValueError("midpoint/tangent counts disagree")
    if num_threads < 1:
        raise ValueError("num_threads must be >= 1")

    # Transpose once so the hot loop walks unit-stride component arrays.
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] q_pos = \
        np.ascontiguousarray(xq.T)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] q_tan = \
        np.ascontiguousarray(dq.T)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] rows = \
        np.empty((n, 3), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] row_min = \
        np.empty(n, dtype=np.float64)

    if n == 0 or m == 0:
        rows[:] = 0.0
        return rows, np.inf

    cdef const double* qx = &q_pos[0, 0]
    cdef const double* qy = &q_pos[1, 0]
    cdef const double* qz = &q_pos[2, 0]
    cdef const double* qtx = &q_tan[0, 0]
    cdef const double* qty = &q_tan[1, 0]
    cdef const double* qtz = &q_tan[2, 0]
    cdef double* rows_ptr = &rows[0, 0]
    cdef double* min_ptr = &row_min[0]

    cdef Py_ssize_t i
    for i in prange(n, nogil=True, schedule="static", num_threads=num_threads):
        min_ptr[i] = _row(
            qx, qy, qz, qtx, qty, qtz, m,
            xp[i, 0], xp[i, 1], xp[i, 2],
            dp[i, 0], dp[i, 1], dp[i, 2],
            rows_ptr + 3 * i,
        )
    return rows, float(np.min(row_min))
