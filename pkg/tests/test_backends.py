"""Parity between the pure-Python kernels and the compiled extension.

Every operation must agree exactly: the term dictionaries hold arbitrary
precision rationals, and the float kernels run the same arithmetic in the
same order, so even the binary results are required to be identical.
"""

import importlib
import os
import random
import subprocess
import sys

import numpy as np
import pytest

pure = importlib.import_module("frameq._poly_core")
try:
    fast = importlib.import_module("frameq._poly_core_cy")
except ImportError:
    fast = None

pytestmark = pytest.mark.skipif(fast is None, reason="compiled backend unavailable")

NVARS = 4


def rand_raw(rng, big=False):
    scale = 10**30 if big else 10
    return pure.gr_new(
        rng.randint(-scale, scale),
        rng.randint(1, scale),
        rng.randint(-scale, scale),
        rng.randint(1, scale),
    )


def rand_terms(rng, n=8, big=False):
    out = {}
    for _ in range(n):
        exps = tuple(rng.randint(0, 3) for _ in range(NVARS))
        out[exps] = rand_raw(rng, big)
    return out


def test_scalar_kernels_agree():
    rng = random.Random(100)
    for big in (False, True):
        for _ in range(200):
            a = rand_raw(rng, big)
            b = rand_raw(rng, big)
            assert pure.gr_add(a, b) == fast.gr_add(a, b)
            assert pure.gr_sub(a, b) == fast.gr_sub(a, b)
            assert pure.gr_mul(a, b) == fast.gr_mul(a, b)
            assert pure.gr_neg(a) == fast.gr_neg(a)
            assert pure.gr_conj(a) == fast.gr_conj(a)
            if not pure.gr_is_zero(b):
                assert pure.gr_inv(b) == fast.gr_inv(b)


def test_normalization_agrees():
    assert pure.gr_new(2, -4, 0, 5) == fast.gr_new(2, -4, 0, 5)
    assert pure.gr_new(0, 7, 6, -9) == fast.gr_new(0, 7, 6, -9)
    with pytest.raises(ZeroDivisionError):
        fast.gr_new(1, 0, 0, 1)
    with pytest.raises(ZeroDivisionError):
        pure.gr_new(1, 0, 0, 1)


def test_term_kernels_agree():
    rng = random.Random(101)
    for big in (False, True):
        for _ in range(40):
            a = rand_terms(rng, big=big)
            b = rand_terms(rng, big=big)
            assert pure.terms_add(a, b) == fast.terms_add(a, b)
            assert pure.terms_sub(a, b) == fast.terms_sub(a, b)
            assert pure.terms_neg(a) == fast.terms_neg(a)
            assert pure.terms_mul(a, b) == fast.terms_mul(a, b)
            c = rand_raw(rng, big)
            assert pure.terms_scale(a, c) == fast.terms_scale(a, c)
            idx = rng.randrange(NVARS)
            assert pure.terms_diff(a, idx) == fast.terms_diff(a, idx)


def test_cancellation_drops_terms_identically():
    rng = random.Random(102)
    for _ in range(30):
        a = rand_terms(rng)
        assert pure.terms_sub(a, a) == {}
        assert fast.terms_sub(a, a) == {}
        na = pure.terms_neg(a)
        assert fast.terms_add(a, na) == {}


def test_eval_packed_bitwise():
    rng = random.Random(103)
    for _ in range(50):
        n = rng.randint(1, 10)
        coeffs = np.array([rng.uniform(-3, 3) for _ in range(n)])
        exps = np.array(
            [[rng.randint(0, 3) for _ in range(3)] for _ in range(n)],
            dtype=np.intc,
        )
        point = np.array([rng.uniform(-2, 2) for _ in range(3)])
        a = pure.eval_packed(coeffs, exps, 0, n, point)
        b = fast.eval_packed(coeffs, exps, 0, n, point)
        assert a == b


def _packed_oscillator():
    from frameq import Chart, parse_polynomial
    from frameq.classical import _packed_system

    chart = Chart(("q",))
    h = parse_polynomial(chart, "p_q^2/2 + q^2/2 + t*q/10")
    return _packed_system(h)


def test_rk4_trajectories_bitwise_identical():
    coeffs, exps, offsets = _packed_oscillator()
    nsteps = 400
    out_pure = np.empty((nsteps + 1, 3))
    out_fast = np.empty((nsteps + 1, 3))
    y0 = np.array([1.0, 0.25])
    a = pure.rk4_hamilton(coeffs, exps, offsets, 1, 0.0, y0, 0.01, nsteps, out_pure)
    b = fast.rk4_hamilton(coeffs, exps, offsets, 1, 0.0, y0, 0.01, nsteps, out_fast)
    assert a == b == -1
    assert np.array_equal(out_pure, out_fast)


def test_rk4_reports_first_bad_step():
    from frameq import Chart, parse_polynomial
    from frameq.classical import _packed_system

    chart = Chart(("q",))
    # dq/dt = q^2 blows up in finite time from q = 1
    h = parse_polynomial(chart, "q^2*p_q")
    coeffs, exps, offsets = _packed_system(h)
    nsteps = 200
    out_pure = np.empty((nsteps + 1, 3))
    out_fast = np.empty((nsteps + 1, 3))
    y0 = np.array([1.0, 0.0])
    a = pure.rk4_hamilton(coeffs, exps, offsets, 1, 0.0, y0, 0.05, nsteps, out_pure)
    b = fast.rk4_hamilton(coeffs, exps, offsets, 1, 0.0, y0, 0.05, nsteps, out_fast)
    assert a == b
    assert a > 0


def test_env_var_selects_pure_backend():
    env = dict(os.environ)
    env["FRAMEQ_PURE_PYTHON"] = "1"
    out = subprocess.run(
        [sys.executable, "-c", "import frameq; print(frameq.backend_name())"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"
    env.pop("FRAMEQ_PURE_PYTHON")
    out = subprocess.run(
        [sys.executable, "-c", "import frameq; print(frameq.backend_name())"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "cython"
