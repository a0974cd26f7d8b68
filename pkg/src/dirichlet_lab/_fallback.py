"""Pure-Python twins of the compiled kernels in ``_kernels.pyx``.

Same signatures, same counter-based random stream.  Used when the
extension is not built or when ``DIRICHLET_LAB_PURE=1`` is set.
"""

import math

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_SCALE = 1.0 / 9007199254740992.0


def partial_sums(lam, coef, s_re, s_im, idx):
    lam = np.asarray(lam, dtype=np.float64)
    coef = np.asarray(coef, dtype=np.complex128)
    idx = np.asarray(idx, dtype=np.int64)
    terms = coef * np.exp(-lam * s_re) * np.exp(-1j * lam * s_im)
    terms[coef == 0] = 0.0
    re_t = terms.real.tolist()
    im_t = terms.imag.tolist()
    out = np.empty(len(idx), dtype=np.complex128)
    re = im = cre = cim = 0.0
    n = 0
    N = len(re_t)
    for k, target in enumerate(idx.tolist()):
        while n < target and n < N:
            x = re_t[n]
            t = re + x
            if abs(re) >= abs(x):
                cre += (re - t) + x
            else:
                cre += (x - t) + re
            re = t
            x = im_t[n]
            t = im + x
            if abs(im) >= abs(x):
                cim += (im - t) + x
            else:
                cim += (x - t) + im
            im = t
            n += 1
        out[k] = complex(re + cre, im + cim)
    return out


def _mix(x):
    with np.errstate(over="ignore"):
        x = x + _GOLDEN
        x = (x ^ (x >> np.uint64(30))) * _M1
        x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


def _uniform(key, step):
    with np.errstate(over="ignore"):
        bits = _mix(key + step)
    return (bits >> np.uint64(11)).astype(np.float64) * _SCALE


def uniforms(seed, walk, step):
    seed = np.uint64(seed)
    walk = np.asarray(walk, dtype=np.uint64)
    step = np.asarray(step, dtype=np.uint64)
    return _uniform(_mix(seed ^ _mix(walk)), step)


def _dist(kind, p, x, y):
    if kind == 0:
        return p[2] - np.hypot(x - p[0], y - p[1])
    return np.minimum.reduce([x - p[0], p[1] - x, y - p[2], p[3] - y])


def wos_walks(kind, params, x0, y0, seed, start, stop, eps, max_steps):
    p = np.asarray(params, dtype=np.float64)
    n = stop - start
    key = _mix(np.uint64(seed) ^ _mix(np.arange(start, stop, dtype=np.uint64)))
    x = np.full(n, float(x0))
    y = np.full(n, float(y0))
    steps = np.zeros(n, dtype=np.int64)
    live = np.arange(n)
    for st in range(max_steps):
        r = _dist(kind, p, x[live], y[live])
        moving = r >= eps
        live, r = live[moving], r[moving]
        if live.size == 0:
            break
        th = 2.0 * math.pi * _uniform(key[live], np.uint64(st))
        # libm cos/sin (as in the compiled kernel), not numpy's SIMD versions
        x[live] += r * np.fromiter(map(math.cos, th.tolist()), np.float64, th.size)
        y[live] += r * np.fromiter(map(math.sin, th.tolist()), np.float64, th.size)
        steps[live] += 1
    return x, y, steps
