# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled term kernels; drop-in twin of `_poly_core`.

Coefficient arithmetic runs on C int64 whenever numerators and denominators
stay below 2^30 (products and cross sums then fit int64 with margin) and
falls back to Python arbitrary-precision integers otherwise, so results are
bit-identical to the pure backend.
"""

from libc.math cimport isfinite
from math import gcd as _pygcd

BACKEND_NAME = "cython"

RAW_ZERO = (0, 1, 0, 1)
RAW_ONE = (1, 1, 0, 1)
RAW_I = (0, 1, 1, 1)

cdef extern from "Python.h":
    long long PyLong_AsLongLongAndOverflow(object, int*) except? -1

cdef long long _SMALL = 1 << 30


cdef inline long long _cgcd(long long a, long long b) noexcept:
    cdef long long t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        t = a % b
        a = b
        b = t
    return a


cdef inline bint _fits(object o, long long* out) except -1:
    cdef int overflow = 0
    cdef long long v = PyLong_AsLongLongAndOverflow(o, &overflow)
    if overflow:
        return 0
    if v > _SMALL or v < -_SMALL:
        return 0
    out[0] = v
    return 1


cdef tuple _c_reduce(long long n, long long d):
    cdef long long g
    if n == 0:
        return (0, 1)
    if d < 0:
        n = -n
        d = -d
    g = _cgcd(n, d)
    if g > 1:
        n //= g
        d //= g
    return (n, d)


cdef tuple _py_reduce(object n, object d):
    if d == 0:
        raise ZeroDivisionError("rational with zero denominator")
    if n == 0:
        return (0, 1)
    if d < 0:
        n = -n
        d = -d
    g = _pygcd(n, d)
    if g > 1:
        n = n // g
        d = d // g
    return (n, d)


cdef tuple _radd4(object n1, object d1, object n2, object d2):
    cdef long long a, b, c, d
    if _fits(n1, &a) and _fits(d1, &b) and _fits(n2, &c) and _fits(d2, &d):
        return _c_reduce(a * d + c * b, b * d)
    return _py_reduce(n1 * d2 + n2 * d1, d1 * d2)


cdef tuple _rmul4(object n1, object d1, object n2, object d2):
    cdef long long a, b, c, d
    if _fits(n1, &a) and _fits(d1, &b) and _fits(n2, &c) and _fits(d2, &d):
        return _c_reduce(a * c, b * d)
    return _py_reduce(n1 * n2, d1 * d2)


def rat_reduce(n, d):
    cdef long long cn, cd
    if d == 0:
        raise ZeroDivisionError("rational with zero denominator")
    if _fits(n, &cn) and _fits(d, &cd):
        return _c_reduce(cn, cd)
    return _py_reduce(n, d)


def gr_new(re_n, re_d, im_n, im_d):
    cdef tuple re = rat_reduce(re_n, re_d)
    cdef tuple im = rat_reduce(im_n, im_d)
    return (re[0], re[1], im[0], im[1])


def gr_add(tuple a, tuple b):
    cdef tuple re = _radd4(a[0], a[1], b[0], b[1])
    cdef tuple im = _radd4(a[2], a[3], b[2], b[3])
    return (re[0], re[1], im[0], im[1])


def gr_sub(tuple a, tuple b):
    cdef tuple re = _radd4(a[0], a[1], -b[0], b[1])
    cdef tuple im = _radd4(a[2], a[3], -b[2], b[3])
    return (re[0], re[1], im[0], im[1])


def gr_neg(tuple a):
    return (-a[0], a[1], -a[2], a[3])


def gr_conj(tuple a):
    return (a[0], a[1], -a[2], a[3])


cdef tuple _gr_mul(tuple a, tuple b):
    cdef tuple xu = _rmul4(a[0], a[1], b[0], b[1])
    cdef tuple yv = _rmul4(a[2], a[3], b[2], b[3])
    cdef tuple xv = _rmul4(a[0], a[1], b[2], b[3])
    cdef tuple yu = _rmul4(a[2], a[3], b[0], b[1])
    cdef tuple re = _radd4(xu[0], xu[1], -yv[0], yv[1])
    cdef tuple im = _radd4(xv[0], xv[1], yu[0], yu[1])
    return (re[0], re[1], im[0], im[1])


def gr_mul(tuple a, tuple b):
    return _gr_mul(a, b)


def gr_inv(tuple a):
    cdef tuple x2 = _rmul4(a[0], a[1], a[0], a[1])
    cdef tuple y2 = _rmul4(a[2], a[3], a[2], a[3])
    cdef tuple s = _radd4(x2[0], x2[1], y2[0], y2[1])
    if s[0] == 0:
        raise ZeroDivisionError("inverse of zero")
    cdef tuple re = _rmul4(a[0], a[1], s[1], s[0])
    cdef tuple im = _rmul4(-a[2], a[3], s[1], s[0])
    return (re[0], re[1], im[0], im[1])


def gr_is_zero(tuple a):
    return a[0] == 0 and a[2] == 0


def gr_scale_int(tuple a, k):
    cdef tuple re = _rmul4(a[0], a[1], k, 1)
    cdef tuple im = _rmul4(a[2], a[3], k, 1)
    return (re[0], re[1], im[0], im[1])


cdef inline tuple _gr_add(tuple a, tuple b):
    cdef tuple re = _radd4(a[0], a[1], b[0], b[1])
    cdef tuple im = _radd4(a[2], a[3], b[2], b[3])
    return (re[0], re[1], im[0], im[1])


cdef inline tuple _exps_add(tuple ea, tuple eb):
    cdef Py_ssize_t n = len(ea), i
    cdef list tmp = [None] * n
    cdef long s
    for i in range(n):
        s = <long> (ea[i]) + <long> (eb[i])
        tmp[i] = s
    return tuple(tmp)


def terms_add(dict a, dict b):
    cdef dict out = dict(a)
    cdef tuple c, prev, s
    for exps, c in b.items():
        prev = out.get(exps)
        if prev is None:
            out[exps] = c
        else:
            s = _gr_add(prev, c)
            if s[0] == 0 and s[2] == 0:
                del out[exps]
            else:
                out[exps] = s
    return out


def terms_sub(dict a, dict b):
    cdef dict out = dict(a)
    cdef tuple c, prev, s
    for exps, c in b.items():
        prev = out.get(exps)
        if prev is None:
            out[exps] = (-c[0], c[1], -c[2], c[3])
        else:
            s = _gr_add(prev, (-c[0], c[1], -c[2], c[3]))
            if s[0] == 0 and s[2] == 0:
                del out[exps]
            else:
                out[exps] = s
    return out


def terms_neg(dict a):
    cdef dict out = {}
    cdef tuple c
    for exps, c in a.items():
        out[exps] = (-c[0], c[1], -c[2], c[3])
    return out


def terms_scale(dict a, tuple c):
    cdef dict out = {}
    cdef tuple v
    if c[0] == 0 and c[2] == 0:
        return out
    for exps, v in a.items():
        out[exps] = _gr_mul(v, c)
    return out


def terms_mul(dict a, dict b):
    cdef dict out = {}
    cdef tuple ea, eb, exps, ca, cb, c, prev
    if len(a) > len(b):
        a, b = b, a
    for ea, ca in a.items():
        for eb, cb in b.items():
            exps = _exps_add(ea, eb)
            c = _gr_mul(ca, cb)
            prev = out.get(exps)
            if prev is not None:
                c = _gr_add(prev, c)
            if c[0] == 0 and c[2] == 0:
                out.pop(exps, None)
            else:
                out[exps] = c
    return out


def terms_diff(dict a, Py_ssize_t idx):
    cdef dict out = {}
    cdef tuple exps, lowered, c, c2, prev
    cdef long e
    for exps, c in a.items():
        e = <long> (exps[idx])
        if e == 0:
            continue
        lowered = exps[:idx] + (e - 1,) + exps[idx + 1:]
        c2 = gr_scale_int(c, e)
        prev = out.get(lowered)
        if prev is not None:
            c2 = _gr_add(prev, c2)
        if c2[0] == 0 and c2[2] == 0:
            out.pop(lowered, None)
        else:
            out[lowered] = c2
    return out


# -- packed float evaluation and the fixed-step loop ------------------------


cdef double _eval_c(double[::1] coeffs, int[:, ::1] exps, Py_ssize_t lo,
                    Py_ssize_t hi, double* x, int nv) noexcept:
    cdef double s = 0.0, term, base
    cdef Py_ssize_t k
    cdef int v, e, r
    for k in range(lo, hi):
        term = coeffs[k]
        for v in range(nv):
            e = exps[k, v]
            if e:
                base = x[v]
                for r in range(e):
                    term *= base
        s += term
    return s


def eval_packed(double[::1] coeffs, int[:, ::1] exps, Py_ssize_t lo,
                Py_ssize_t hi, point):
    cdef double x[65]
    cdef int nv = len(point), v
    if nv > 65:
        raise ValueError("too many variables for the compiled evaluator")
    for v in range(nv):
        x[v] = point[v]
    return _eval_c(coeffs, exps, lo, hi, x, nv)


cdef void _rhs_c(double[::1] coeffs, int[:, ::1] exps, long long[::1] offsets,
                 int n, double t, double* y, double* out) noexcept:
    cdef double x[65]
    cdef int j
    x[0] = t
    for j in range(n):
        x[1 + j] = y[j]
    for j in range(n):
        out[j] = _eval_c(coeffs, exps, offsets[j], offsets[j + 1], x, n + 1)


def rk4_hamilton(double[::1] coeffs, int[:, ::1] exps, long long[::1] offsets,
                 int nq, double t0, y0, double dt, long nsteps,
                 double[:, ::1] out):
    cdef int n = 2 * nq, j
    cdef double y[64]
    cdef double k1[64]
    cdef double k2[64]
    cdef double k3[64]
    cdef double k4[64]
    cdef double yt[64]
    cdef double t, half
    cdef long step
    cdef bint ok
    if n > 64:
        raise ValueError("too many degrees of freedom for the compiled loop")
    for j in range(n):
        y[j] = y0[j]
    t = t0
    out[0, 0] = t
    for j in range(n):
        out[0, 1 + j] = y[j]
    half = 0.5 * dt
    for step in range(1, nsteps + 1):
        _rhs_c(coeffs, exps, offsets, n, t, y, k1)
        for j in range(n):
            yt[j] = y[j] + half * k1[j]
        _rhs_c(coeffs, exps, offsets, n, t + half, yt, k2)
        for j in range(n):
            yt[j] = y[j] + half * k2[j]
        _rhs_c(coeffs, exps, offsets, n, t + half, yt, k3)
        for j in range(n):
            yt[j] = y[j] + dt * k3[j]
        _rhs_c(coeffs, exps, offsets, n, t + dt, yt, k4)
        ok = True
        for j in range(n):
            y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            if not isfinite(y[j]):
                ok = False
        t = t0 + step * dt
        out[step, 0] = t
        for j in range(n):
            out[step, 1 + j] = y[j]
        if not ok:
            return step
    return -1
