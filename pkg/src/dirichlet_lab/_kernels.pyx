# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: compensated partial sums and walk-on-spheres walks.

Every function here has a pure-Python twin in ``_fallback`` with the same
signature; ``_backend`` picks one at import time.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, cos, sin, sqrt, fabs, hypot, M_PI
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()


cdef inline void _two_sum_add(double *acc, double *comp, double x) noexcept nogil:
    # Neumaier variant: correct even when |x| > |acc|
    cdef double t = acc[0] + x
    if fabs(acc[0]) >= fabs(x):
        comp[0] += (acc[0] - t) + x
    else:
        comp[0] += (x - t) + acc[0]
    acc[0] = t


def partial_sums(const double[::1] lam, const double complex[::1] coef,
                 double s_re, double s_im, const int64_t[::1] idx):
    """S_m(s) for every m in ``idx`` (1-based, nondecreasing)."""
    cdef Py_ssize_t K = idx.shape[0]
    cdef Py_ssize_t N = lam.shape[0]
    out = np.empty(K, dtype=np.complex128)
    cdef double complex[::1] res = out
    cdef double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0
    cdef double mag, ph, tr, ti, ar, ai
    cdef Py_ssize_t n = 0, k
    cdef int64_t target
    with nogil:
        for k in range(K):
            target = idx[k]
            while n < target and n < N:
                ar = coef[n].real
                ai = coef[n].imag
                if ar != 0.0 or ai != 0.0:
                    mag = exp(-lam[n] * s_re)
                    ph = -lam[n] * s_im
                    tr = mag * cos(ph)
                    ti = mag * sin(ph)
                    _two_sum_add(&re, &cre, ar * tr - ai * ti)
                    _two_sum_add(&im, &cim, ar * ti + ai * tr)
                n += 1
            res[k].real = re + cre
            res[k].imag = im + cim
    return out


cdef inline uint64_t _mix(uint64_t x) noexcept nogil:
    x += <uint64_t>0x9E3779B97F4A7C15ULL
    x = (x ^ (x >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    x = (x ^ (x >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return x ^ (x >> 31)


cdef inline double _uniform(uint64_t key, uint64_t step) noexcept nogil:
    return <double>(_mix(key + step) >> 11) * (1.0 / 9007199254740992.0)


def uniforms(uint64_t seed, const uint64_t[::1] walk, const uint64_t[::1] step):
    """Counter-based uniforms on [0, 1) keyed by (seed, walk, step)."""
    cdef Py_ssize_t n = walk.shape[0], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] res = out
    for i in range(n):
        res[i] = _uniform(_mix(seed ^ _mix(walk[i])), step[i])
    return out


cdef inline double _dist(int kind, const double[::1] p, double x, double y) noexcept nogil:
    cdef double d
    if kind == 0:
        return p[2] - hypot(x - p[0], y - p[1])
    d = x - p[0]
    if p[1] - x < d:
        d = p[1] - x
    if y - p[2] < d:
        d = y - p[2]
    if p[3] - y < d:
        d = p[3] - y
    return d


def wos_walks(int kind, const double[::1] params, double x0, double y0,
              uint64_t seed, Py_ssize_t start, Py_ssize_t stop,
              double eps, Py_ssize_t max_steps):
    """Run walks ``start..stop-1``; returns final x, y and step counts.

    kind 0 is a disc (cx, cy, r), kind 1 a rectangle (x0, x1, y0, y1).
    A step count of ``max_steps`` with distance above ``eps`` marks a
    walk that was not absorbed.
    """
    cdef Py_ssize_t n = stop - start, w, st
    xs = np.empty(n, dtype=np.float64)
    ys = np.empty(n, dtype=np.float64)
    steps = np.empty(n, dtype=np.int64)
    cdef double[::1] xv = xs, yv = ys
    cdef int64_t[::1] sv = steps
    cdef double x, y, r, th
    cdef uint64_t key
    with nogil:
        for w in range(n):
            key = _mix(seed ^ _mix(<uint64_t>(start + w)))
            x = x0
            y = y0
            st = 0
            while st < max_steps:
                r = _dist(kind, params, x, y)
                if r < eps:
                    break
                th = 2.0 * M_PI * _uniform(key, <uint64_t>st)
                x = x + r * cos(th)
                y = y + r * sin(th)
                st += 1
            xv[w] = x
            yv[w] = y
            sv[w] = st
    return xs, ys, steps
