"""Pure-Python term kernels.

Reference implementation of the hot inner loops; `_poly_core_cy` is the
compiled twin with identical signatures and results.  A polynomial is a dict
mapping exponent tuples to "raw" Gaussian-rational coefficients
``(re_num, re_den, im_num, im_den)`` with reduced positive denominators and
no zero entries stored.  All functions are free of package imports so both
backends stay drop-in interchangeable.
"""

from math import gcd, isfinite

BACKEND_NAME = "python"

RAW_ZERO = (0, 1, 0, 1)
RAW_ONE = (1, 1, 0, 1)
RAW_I = (0, 1, 1, 1)


def rat_reduce(n, d):
    """Normalize n/d to lowest terms with d > 0."""
    if d == 0:
        raise ZeroDivisionError("rational with zero denominator")
    if n == 0:
        return 0, 1
    if d < 0:
        n, d = -n, -d
    g = gcd(n, d)
    if g > 1:
        n //= g
        d //= g
    return n, d


def _radd(n1, d1, n2, d2):
    return rat_reduce(n1 * d2 + n2 * d1, d1 * d2)


def _rmul(n1, d1, n2, d2):
    return rat_reduce(n1 * n2, d1 * d2)


def gr_new(re_n, re_d, im_n, im_d):
    rn, rd = rat_reduce(re_n, re_d)
    mn, md = rat_reduce(im_n, im_d)
    return (rn, rd, mn, md)


def gr_add(a, b):
    rn, rd = _radd(a[0], a[1], b[0], b[1])
    mn, md = _radd(a[2], a[3], b[2], b[3])
    return (rn, rd, mn, md)


def gr_sub(a, b):
    rn, rd = _radd(a[0], a[1], -b[0], b[1])
    mn, md = _radd(a[2], a[3], -b[2], b[3])
    return (rn, rd, mn, md)


def gr_neg(a):
    return (-a[0], a[1], -a[2], a[3])


def gr_conj(a):
    return (a[0], a[1], -a[2], a[3])


def gr_mul(a, b):
    # (x + iy)(u + iv) = (xu - yv) + i(xv + yu)
    xu = _rmul(a[0], a[1], b[0], b[1])
    yv = _rmul(a[2], a[3], b[2], b[3])
    xv = _rmul(a[0], a[1], b[2], b[3])
    yu = _rmul(a[2], a[3], b[0], b[1])
    rn, rd = _radd(xu[0], xu[1], -yv[0], yv[1])
    mn, md = _radd(xv[0], xv[1], yu[0], yu[1])
    return (rn, rd, mn, md)


def gr_inv(a):
    # 1/(x + iy) = (x - iy) / (x^2 + y^2)
    x2 = _rmul(a[0], a[1], a[0], a[1])
    y2 = _rmul(a[2], a[3], a[2], a[3])
    sn, sd = _radd(x2[0], x2[1], y2[0], y2[1])
    if sn == 0:
        raise ZeroDivisionError("inverse of zero")
    rn, rd = _rmul(a[0], a[1], sd, sn)
    mn, md = _rmul(-a[2], a[3], sd, sn)
    return (rn, rd, mn, md)


def gr_is_zero(a):
    return a[0] == 0 and a[2] == 0


def gr_scale_int(a, k):
    rn, rd = _rmul(a[0], a[1], k, 1)
    mn, md = _rmul(a[2], a[3], k, 1)
    return (rn, rd, mn, md)


# -- term dict operations ---------------------------------------------------


def terms_add(a, b):
    out = dict(a)
    for exps, c in b.items():
        prev = out.get(exps)
        if prev is None:
            out[exps] = c
        else:
            s = gr_add(prev, c)
            if s[0] == 0 and s[2] == 0:
                del out[exps]
            else:
                out[exps] = s
    return out


def terms_sub(a, b):
    out = dict(a)
    for exps, c in b.items():
        prev = out.get(exps)
        if prev is None:
            out[exps] = gr_neg(c)
        else:
            s = gr_sub(prev, c)
            if s[0] == 0 and s[2] == 0:
                del out[exps]
            else:
                out[exps] = s
    return out


def terms_neg(a):
    return {exps: gr_neg(c) for exps, c in a.items()}


def terms_scale(a, c):
    if c[0] == 0 and c[2] == 0:
        return {}
    return {exps: gr_mul(v, c) for exps, v in a.items()}


def terms_mul(a, b):
    if len(a) > len(b):
        a, b = b, a
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            exps = tuple(x + y for x, y in zip(ea, eb))
            c = gr_mul(ca, cb)
            prev = out.get(exps)
            if prev is not None:
                c = gr_add(prev, c)
            if c[0] == 0 and c[2] == 0:
                out.pop(exps, None)
            else:
                out[exps] = c
    return out


def terms_diff(a, idx):
    out = {}
    for exps, c in a.items():
        e = exps[idx]
        if e == 0:
            continue
        lowered = exps[:idx] + (e - 1,) + exps[idx + 1 :]
        c2 = gr_scale_int(c, e)
        prev = out.get(lowered)
        if prev is not None:
            c2 = gr_add(prev, c2)
        if c2[0] == 0 and c2[2] == 0:
            out.pop(lowered, None)
        else:
            out[lowered] = c2
    return out


# -- packed float evaluation and the fixed-step loop ------------------------


def eval_packed(coeffs, exps, lo, hi, point):
    """Evaluate one packed real polynomial at a float point.

    Powers are expanded as repeated products, the same operation order as
    the compiled twin, so both backends agree bit for bit.
    """
    s = 0.0
    for k in range(lo, hi):
        term = float(coeffs[k])
        row = exps[k]
        for v in range(len(point)):
            e = row[v]
            if e:
                x = float(point[v])
                for _ in range(e):
                    term *= x
        s += term
    return s


def _rhs(coeffs, exps, offsets, npoly, t, y, out):
    point = (t, *y)
    for j in range(npoly):
        out[j] = eval_packed(coeffs, exps, offsets[j], offsets[j + 1], point)


def rk4_hamilton(coeffs, exps, offsets, nq, t0, y0, dt, nsteps, out):
    """Classic fixed-step RK4 for the packed first-order system.

    ``out`` must be a preallocated (nsteps + 1, 1 + 2*nq) float64 buffer;
    row i receives (t_i, q, p).  Returns the index of the first row at which
    the state went non-finite, or -1 on success (matching the compiled twin).
    """
    n = 2 * nq
    y = [float(v) for v in y0]
    k1 = [0.0] * n
    k2 = [0.0] * n
    k3 = [0.0] * n
    k4 = [0.0] * n
    yt = [0.0] * n
    t = float(t0)
    out[0, 0] = t
    for j in range(n):
        out[0, 1 + j] = y[j]
    for step in range(1, nsteps + 1):
        _rhs(coeffs, exps, offsets, n, t, y, k1)
        half = 0.5 * dt
        for j in range(n):
            yt[j] = y[j] + half * k1[j]
        _rhs(coeffs, exps, offsets, n, t + half, yt, k2)
        for j in range(n):
            yt[j] = y[j] + half * k2[j]
        _rhs(coeffs, exps, offsets, n, t + half, yt, k3)
        for j in range(n):
            yt[j] = y[j] + dt * k3[j]
        _rhs(coeffs, exps, offsets, n, t + dt, yt, k4)
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
