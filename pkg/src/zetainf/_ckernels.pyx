# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled membership kernels with the same semantics as ``_pykernels``.

The two can disagree only for points within an ulp or so of an edge: libm's
``pow`` is correctly rounded while numpy's vectorised ``pow`` may be off by one
ulp (depending on the CPU's SIMD support).

Each point is tested independently, so the loops run under OpenMP when the
extension is built with it; results do not depend on the thread count.
"""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport floor, pow, sqrt

from ._pykernels import cantor_levels, stacked_power_offsets

cnp.import_array()

# below this many points the thread start-up costs more than it saves
DEF PARALLEL_MIN = 20000


cdef inline double _pow(double x, double p) noexcept nogil:
    # numpy takes these shortcuts too, so the common exponents round identically
    if p == 2.0:
        return x * x
    if p == 0.5:
        return sqrt(x)
    if p == 1.0:
        return x
    if p == -1.0:
        return 1.0 / x
    return pow(x, p)


cdef inline unsigned char _chain_point(double xi, double alpha, double inv_alpha, double beta,
                                       long j0, const double[::1] ha, const double[::1] hb,
                                       double head_end) noexcept nogil:
    cdef double r, j, jj, a
    cdef int d
    cdef long k
    if xi <= 1.0:
        return 0
    r = _pow(xi, inv_alpha)
    j = floor(r)
    if r - j > 1e-9 and r - j < 1.0 - 1e-9:
        # away from the interval starts only index j can hold x
        a = _pow(j, alpha)
        if xi > a and xi < a + _pow(j, -beta):
            return 1
    else:
        for d in range(-1, 2):
            jj = j + d
            if jj < 1.0:
                continue
            a = _pow(jj, alpha)
            if xi > a and xi < a + _pow(jj, -beta):
                return 1
    if xi < head_end:
        for k in range(1, j0 + 1):
            if xi > ha[k] and xi < hb[k]:
                return 1
    return 0


def interval_chain_contains(x, double alpha, double beta, long j0):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef Py_ssize_t n = xv.shape[0], i
    out = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] ov = out
    cdef double inv_alpha = 1.0 / alpha
    cdef long k
    # head intervals k <= j0, which may overlap their neighbours
    head_a = np.zeros(j0 + 1)
    head_b = np.zeros(j0 + 1)
    cdef double[::1] ha = head_a
    cdef double[::1] hb = head_b
    cdef double head_end = 0.0
    for k in range(1, j0 + 1):
        ha[k] = _pow(<double>k, alpha)
        hb[k] = ha[k] + _pow(<double>k, -beta)
        if hb[k] > head_end:
            head_end = hb[k]
    if n >= PARALLEL_MIN:
        for i in prange(n, nogil=True, schedule="static"):
            ov[i] = _chain_point(xv[i], alpha, inv_alpha, beta, j0, ha, hb, head_end)
    else:
        for i in range(n):
            ov[i] = _chain_point(xv[i], alpha, inv_alpha, beta, j0, ha, hb, head_end)
    return out.view(bool).reshape(np.shape(x))


cdef inline unsigned char _cantor_point(double xi, double yi, double a, double b,
                                        const double[::1] H, const double[::1] h,
                                        Py_ssize_t nlev) noexcept nogil:
    cdef Py_ssize_t m
    cdef double c, local
    if yi <= 0.0 or xi <= 0.0:
        return 0
    m = 1
    while m <= nlev and H[m] <= yi:
        m += 1
    if m > nlev:
        return 0
    c = floor((yi - H[m - 1]) / h[m])
    local = yi - H[m - 1] - c * h[m]
    if c < pow(2.0, <double>(m - 1)) and local > 0.0 \
            and xi > pow(a, -<double>m) and local < pow(xi, -b):
        return 1
    return 0


def cantor_contains(x, y, double a, double b):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64).ravel()
    H_arr, h_arr = cantor_levels(a, b)
    cdef const double[::1] H = H_arr
    cdef const double[::1] h = h_arr
    cdef Py_ssize_t nlev = h.shape[0] - 1
    cdef Py_ssize_t n = xv.shape[0], i
    out = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] ov = out
    if n >= PARALLEL_MIN:
        for i in prange(n, nogil=True, schedule="static"):
            ov[i] = _cantor_point(xv[i], yv[i], a, b, H, h, nlev)
    else:
        for i in range(n):
            ov[i] = _cantor_point(xv[i], yv[i], a, b, H, h, nlev)
    return out.view(bool).reshape(np.shape(x))


cdef inline unsigned char _stacked_point(double xi, double yi, const double[::1] S,
                                         const double[::1] w, Py_ssize_t K) noexcept nogil:
    cdef Py_ssize_t k
    cdef double local
    if yi <= 0.0 or xi <= 1.0:
        return 0
    k = 1
    while k <= K and S[k] <= yi:
        k += 1
    if k > K:
        return 0
    local = yi - S[k - 1]
    if local > 0.0 and local < w[k - 1] * pow(xi, -1.0 - 1.0 / <double>k):
        return 1
    return 0


def stacked_power_contains(x, y):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64).ravel()
    S_arr, w_arr = stacked_power_offsets()
    cdef const double[::1] S = S_arr
    cdef const double[::1] w = w_arr
    cdef Py_ssize_t K = w.shape[0]
    cdef Py_ssize_t n = xv.shape[0], i
    out = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] ov = out
    if n >= PARALLEL_MIN:
        for i in prange(n, nogil=True, schedule="static"):
            ov[i] = _stacked_point(xv[i], yv[i], S, w, K)
    else:
        for i in range(n):
            ov[i] = _stacked_point(xv[i], yv[i], S, w, K)
    return out.view(bool).reshape(np.shape(x))
